//! Institutional arrangements: players first decide whether to join
//! bargaining over a binding agreement to travel without CAVs.
//!
//! The incentive ratio `beta` compares the gain from forming the smallest
//! effective NC group with the gain from defecting from it. When `k* = n`
//! every player participates. Otherwise each participates independently with
//! probability `t`, where `x = t / (1 - t)` is the unique positive root of
//!
//! ```text
//! G(x) = sum_{k = k*}^{n-1} C_k x^(k - k* + 1) = beta,
//! C_k* = (n - k*) / k*,   C_k = C_{k-1} (n - k) / k.
//! ```

use rayon::prelude::*;
use serde::Serialize;

use crate::binomial::upper_tail;
use crate::error::{Error, Result};
use crate::game::{GameParams, Strategy};

/// Above this many coefficients `G` is evaluated in log space.
const LOG_SPACE_THRESHOLD: usize = 300;

/// The twenty player counts of the published numerical study.
pub const TABLE1_N: [usize; 20] = [
    3, 4, 5, 6, 7, 8, 9, 10, 11, 12, 13, 14, 15, 20, 25, 30, 35, 40, 45, 50,
];

/// Premium `d` behind the published numerical study.
///
/// Only "d ~ 2" is reported, and `d = 2` gives `beta(4) = 0.200` instead of
/// the printed 0.166. For `n = 3`, `k* = 3` and `beta = 3 / (2d - 1)`; the
/// printed `beta = 0.930` then gives `d = (3 / 0.930 + 1) / 2 = 131/62
/// ~ 2.11290`, which reproduces every other row to the printed precision.
pub fn table1_d0() -> f64 {
    (3.0 / 0.930 + 1.0) / 2.0
}

/// Base benefit used when only `d` matters (`beta`, `t` and the
/// probabilities do not depend on `c`).
pub fn default_c(d: f64) -> f64 {
    d + 2.0
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum Regime {
    /// `k* = n`: everyone participates with certainty.
    FullParticipation,
    /// `k* < n`: symmetric mixed participation with `0 < t < 1`.
    Mixed,
}

/// Solution of the participation stage for one game.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct InstitutionSolution {
    pub n: usize,
    pub k_star: usize,
    pub beta: f64,
    pub regime: Regime,
    pub t: f64,
    #[serde(rename = "p_A")]
    pub p_agree: f64,
    #[serde(rename = "p_I")]
    pub p_insider: f64,
    #[serde(rename = "p_F")]
    pub p_freerider: f64,
}

/// Incentive ratio `(k*(d+1) - n d) / (d(n-1) - 1)`.
pub fn beta(g: &GameParams) -> f64 {
    let n = g.n() as f64;
    let d = g.d();
    (g.k_star() as f64 * (d + 1.0) - n * d) / (d * (n - 1.0) - 1.0)
}

/// `beta` from its payoff definition,
/// `(f(NC, k*-1) - f(C, 0)) / (f(C, k*-1) - f(NC, k*-1))`.
pub fn beta_from_payoffs(g: &GameParams) -> f64 {
    let k = g.k_star() - 1;
    let f_nc = g.payoff_unchecked(Strategy::NC, k);
    let f_c = g.payoff_unchecked(Strategy::C, k);
    let base = g.payoff_unchecked(Strategy::C, 0);
    (f_nc - base) / (f_c - f_nc)
}

/// `(d+1) / (d(n-1) - 1)`, an upper bound on `beta` that vanishes as `n`
/// grows.
pub fn beta_upper_bound(g: &GameParams) -> f64 {
    (g.d() + 1.0) / (g.d() * (g.n() as f64 - 1.0) - 1.0)
}

/// The participation polynomial `G(x)` of one game.
#[derive(Clone, Debug)]
pub struct ParticipationPolynomial {
    /// `ln C_k` for `k = k*..n-1`; the `j`-th entry multiplies `x^(j+1)`.
    ln_coeffs: Vec<f64>,
    log_space: bool,
}

impl ParticipationPolynomial {
    pub fn new(n: usize, k_star: usize) -> Self {
        let mut ln_coeffs = Vec::with_capacity(n.saturating_sub(k_star));
        let mut acc = 0.0;
        for k in k_star..n {
            acc += ((n - k) as f64).ln() - (k as f64).ln();
            ln_coeffs.push(acc);
        }
        let log_space = ln_coeffs.len() > LOG_SPACE_THRESHOLD;
        ParticipationPolynomial {
            ln_coeffs,
            log_space,
        }
    }

    pub fn for_game(g: &GameParams) -> Self {
        Self::new(g.n(), g.k_star())
    }

    pub fn degree(&self) -> usize {
        self.ln_coeffs.len()
    }

    pub fn coefficients(&self) -> Vec<f64> {
        self.ln_coeffs.iter().map(|c| c.exp()).collect()
    }

    pub fn eval(&self, x: f64) -> f64 {
        if x <= 0.0 || self.ln_coeffs.is_empty() {
            return 0.0;
        }
        if self.log_space {
            let ln_x = x.ln();
            let terms = self
                .ln_coeffs
                .iter()
                .enumerate()
                .map(|(j, c)| c + (j + 1) as f64 * ln_x);
            let max = terms.clone().fold(f64::NEG_INFINITY, f64::max);
            (max + terms.map(|t| (t - max).exp()).sum::<f64>().ln()).exp()
        } else {
            // Horner on x * (C_0 + x (C_1 + ...))
            let acc = self
                .ln_coeffs
                .iter()
                .rev()
                .fold(0.0, |acc, c| acc * x + c.exp());
            acc * x
        }
    }
}

/// Bisection settings for [`solve_t_with`].
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SolveOptions {
    /// First upper end of the bracket in `x = t/(1-t)`, doubled until
    /// `G(x) > beta`.
    pub initial_upper: f64,
    /// Stop once the bracket is narrower than this in `t`.
    pub t_tolerance: f64,
    pub max_iterations: usize,
}

impl Default for SolveOptions {
    fn default() -> Self {
        SolveOptions {
            initial_upper: 1.0,
            t_tolerance: 1e-12,
            max_iterations: 4096,
        }
    }
}

/// Final bracket of the participation root, in `t`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct RootBracket {
    pub t_lo: f64,
    pub t_hi: f64,
    pub iterations: usize,
}

impl RootBracket {
    pub fn width(&self) -> f64 {
        self.t_hi - self.t_lo
    }
}

fn x_to_t(x: f64) -> f64 {
    x / (1.0 + x)
}

/// Solves the participation stage with the default bisection settings.
pub fn solve_t(g: &GameParams) -> Result<InstitutionSolution> {
    solve_t_with(g, SolveOptions::default()).map(|(sol, _)| sol)
}

/// Solves the participation stage, also returning the final bracket
/// (`None` in the full-participation regime).
pub fn solve_t_with(
    g: &GameParams,
    opts: SolveOptions,
) -> Result<(InstitutionSolution, Option<RootBracket>)> {
    let n = g.n();
    let k_star = g.k_star();
    let b = beta(g);
    if k_star >= n {
        let sol = InstitutionSolution {
            n,
            k_star,
            beta: b,
            regime: Regime::FullParticipation,
            t: 1.0,
            p_agree: 1.0,
            p_insider: 1.0,
            p_freerider: 0.0,
        };
        return Ok((sol, None));
    }

    let poly = ParticipationPolynomial::for_game(g);
    let mut lo = 0.0_f64;
    let mut hi = if opts.initial_upper > 0.0 && opts.initial_upper.is_finite() {
        opts.initial_upper
    } else {
        1.0
    };
    let mut iterations = 0;
    let fail = |lo: f64, hi: f64, iterations| Error::NonConvergence {
        t_lo: x_to_t(lo),
        t_hi: x_to_t(hi),
        iterations,
    };

    while poly.eval(hi) <= b {
        lo = hi;
        hi *= 2.0;
        iterations += 1;
        if !hi.is_finite() || iterations >= opts.max_iterations {
            return Err(fail(lo, hi, iterations));
        }
    }
    while x_to_t(hi) - x_to_t(lo) >= opts.t_tolerance {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi || iterations >= opts.max_iterations {
            return Err(fail(lo, hi, iterations));
        }
        if poly.eval(mid) < b {
            lo = mid;
        } else {
            hi = mid;
        }
        iterations += 1;
    }

    let bracket = RootBracket {
        t_lo: x_to_t(lo),
        t_hi: x_to_t(hi),
        iterations,
    };
    let t = x_to_t(0.5 * (lo + hi));
    let (p_agree, p_insider, p_freerider) = participation_probabilities_for(n, k_star, t)?;
    let sol = InstitutionSolution {
        n,
        k_star,
        beta: b,
        regime: Regime::Mixed,
        t,
        p_agree,
        p_insider,
        p_freerider,
    };
    Ok((sol, Some(bracket)))
}

/// `(p_agree, p_insider, p_freerider)` when each player participates
/// independently with probability `t`.
pub fn participation_probabilities(g: &GameParams, t: f64) -> Result<(f64, f64, f64)> {
    participation_probabilities_for(g.n(), g.k_star(), t)
}

/// Same as [`participation_probabilities`] from `(n, k*)` directly.
///
/// * agreement: at least `k*` of the `n` players participate;
/// * insider: a given player participates and at least `k* - 1` others do;
/// * free rider: a given player stays out while at least `k*` others
///   participate.
pub fn participation_probabilities_for(n: usize, k_star: usize, t: f64) -> Result<(f64, f64, f64)> {
    if !(0.0..=1.0).contains(&t) {
        return Err(Error::OutOfRangeT { t });
    }
    let p_agree = upper_tail(n, t, k_star);
    let p_insider = t * upper_tail(n - 1, t, k_star.saturating_sub(1));
    let p_freerider = (1.0 - t) * upper_tail(n - 1, t, k_star);
    Ok((p_agree, p_insider, p_freerider))
}

/// `beta` along a sequence of player counts at fixed `d`.
#[derive(Clone, Debug, Default)]
pub struct BetaProfile {
    /// `(n, beta)` in input order.
    pub points: Vec<(usize, f64)>,
    /// Player counts that do not form a valid game with this `d`.
    pub skipped: Vec<(usize, Error)>,
}

pub fn beta_limit_profile(d: f64, n_values: &[usize]) -> BetaProfile {
    let c = default_c(d);
    let results: Vec<(usize, Result<f64>)> = n_values
        .par_iter()
        .map(|&n| (n, GameParams::new(n, c, d).map(|g| beta(&g))))
        .collect();
    let mut profile = BetaProfile::default();
    for (n, r) in results {
        match r {
            Ok(b) => profile.points.push((n, b)),
            Err(e) => profile.skipped.push((n, e)),
        }
    }
    profile
}

/// Solves every `n` in `ns` at premium `d`, preserving input order.
pub fn sweep(d: f64, ns: &[usize]) -> Vec<(usize, Result<InstitutionSolution>)> {
    let c = default_c(d);
    ns.par_iter()
        .map(|&n| (n, GameParams::new(n, c, d).and_then(|g| solve_t(&g))))
        .collect()
}
