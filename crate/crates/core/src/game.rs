//! The base n-player CAV travel game.
//!
//! Each of `n` travelers either stays out of a CAV ([`Strategy::NC`]) or
//! travels in one ([`Strategy::C`]). A CAV traveler gains a premium `d` over
//! the base benefit `c` but imposes a cost `e = d + 1` on society, shared
//! equally as `phi = e / n` per player. With `k` counting the *other* players
//! who choose NC, the payoffs are
//!
//! ```text
//! f(NC, k) = c - (n - k - 1) * phi
//! f(C,  k) = c + d - (n - k) * phi
//! ```
//!
//! so C beats NC by the constant `alpha = d - phi` at every `k`, while
//! everyone prefers universal NC to universal C.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Guard band used when testing `n*d/(d+1)` for integrality.
pub const INTEGER_RATIO_TOLERANCE: f64 = 1e-9;

/// A traveler's action.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Strategy {
    /// Non-CAV travel (the cooperative action).
    NC,
    /// CAV travel (the dominant action).
    C,
}

impl Strategy {
    pub fn other(self) -> Self {
        match self {
            Strategy::NC => Strategy::C,
            Strategy::C => Strategy::NC,
        }
    }
}

/// Validated game parameters together with their derived quantities.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct GameParams {
    n: usize,
    c: f64,
    d: f64,
    e: f64,
    phi: f64,
    alpha: f64,
    k_star: usize,
}

impl GameParams {
    /// Validates `(n, c, d)` and computes `e`, `phi`, `alpha` and `k*`.
    pub fn new(n: usize, c: f64, d: f64) -> Result<Self> {
        if !c.is_finite() {
            return Err(Error::RejectsNonFinite {
                name: "c",
                value: c,
            });
        }
        if !d.is_finite() {
            return Err(Error::RejectsNonFinite {
                name: "d",
                value: d,
            });
        }
        if n <= 2 {
            return Err(Error::RejectsNTooSmall { n });
        }
        let nf = n as f64;
        let slack = d * (nf - 2.0);
        if slack <= 2.0 {
            return Err(Error::RejectsDConstraint { n, d, value: slack });
        }
        let e = d + 1.0;
        if c <= e {
            return Err(Error::RejectsCostOrder { c, e });
        }
        let ratio = nf * d / e;
        if (ratio - ratio.round()).abs() < INTEGER_RATIO_TOLERANCE {
            return Err(Error::RejectsIntegerRatio { n, d, ratio });
        }
        let phi = e / nf;
        let alpha = d - phi;
        debug_assert!(alpha > 0.0);
        Ok(GameParams {
            n,
            c,
            d,
            e,
            phi,
            alpha,
            k_star: ratio.floor() as usize + 1,
        })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn c(&self) -> f64 {
        self.c
    }

    pub fn d(&self) -> f64 {
        self.d
    }

    /// Cost to society of one CAV traveler, `d + 1`.
    pub fn e(&self) -> f64 {
        self.e
    }

    /// Per-player damage share `e / n`.
    pub fn phi(&self) -> f64 {
        self.phi
    }

    /// Constant gain of C over NC, `d - phi`.
    pub fn alpha(&self) -> f64 {
        self.alpha
    }

    /// `n*d/(d+1)`, never integral for a valid game.
    pub fn threshold_ratio(&self) -> f64 {
        self.n as f64 * self.d / self.e
    }

    /// Minimally effective number of NC travelers, `floor(n*d/(d+1)) + 1`.
    pub fn k_star(&self) -> usize {
        self.k_star
    }

    /// Payoff of strategy `s` when `k` other players choose NC.
    pub fn payoff(&self, s: Strategy, k: usize) -> Result<f64> {
        if k >= self.n {
            return Err(Error::OutOfRangeK {
                k,
                min: 0,
                max: self.n - 1,
            });
        }
        Ok(self.payoff_unchecked(s, k))
    }

    /// The payoff formula evaluated at any `k`, including `k = n` where some
    /// aggregate expressions reach outside the strategic range.
    pub(crate) fn payoff_unchecked(&self, s: Strategy, k: usize) -> f64 {
        let others_c = self.n as f64 - k as f64;
        match s {
            Strategy::NC => self.c - (others_c - 1.0) * self.phi,
            Strategy::C => self.c + self.d - others_c * self.phi,
        }
    }

    /// `alpha = d - phi`.
    pub fn payoff_difference(&self) -> f64 {
        self.alpha
    }

    /// Total pecuniary payout `n*f(C, m) - m*alpha` with `m` NC travelers.
    pub fn social_welfare(&self, m: usize) -> Result<f64> {
        if m > self.n {
            return Err(Error::OutOfRangeM { m, n: self.n });
        }
        Ok(self.social_welfare_unchecked(m))
    }

    pub(crate) fn social_welfare_unchecked(&self, m: usize) -> f64 {
        self.n as f64 * self.payoff_unchecked(Strategy::C, m) - m as f64 * self.alpha
    }

    /// Checks the dilemma's structural claims by exhaustive evaluation over
    /// every `k` in `[0, n-1]`.
    pub fn check_structure(&self) -> StructureReport {
        let n = self.n;
        let f = |s, k| self.payoff_unchecked(s, k);
        let baseline = f(Strategy::C, 0);
        let k_star = self.k_star;

        let dominance = (0..n).all(|k| f(Strategy::C, k) > f(Strategy::NC, k));
        let monotonicity = (1..n).all(|k| {
            f(Strategy::NC, k) > f(Strategy::NC, k - 1) && f(Strategy::C, k) > f(Strategy::C, k - 1)
        });
        let nonnegativity = (0..n).all(|k| f(Strategy::NC, k) >= 0.0 && f(Strategy::C, k) >= 0.0);
        let pareto_relation = f(Strategy::NC, n - 1) > baseline;
        let desirability = (0..n).all(|k| {
            let social = self.social_welfare_unchecked(k + 1) > self.social_welfare_unchecked(k);
            let individual = f(Strategy::NC, k + 1) > f(Strategy::NC, k);
            social && individual
        });
        let k_star_sandwich = (0..n).all(|k| {
            if k + 1 >= k_star {
                f(Strategy::NC, k) > baseline
            } else {
                f(Strategy::NC, k) < baseline
            }
        });

        StructureReport {
            dominance,
            monotonicity,
            nonnegativity,
            pareto_relation,
            desirability,
            k_star_sandwich,
        }
    }

    /// Each player's payoff under `profile`.
    pub fn profile_payoffs(&self, profile: &OutcomeProfile) -> Result<Vec<f64>> {
        self.check_len(profile)?;
        let m = profile.nc_count();
        Ok(profile
            .strategies()
            .iter()
            .map(|&s| {
                let others_nc = if s == Strategy::NC { m - 1 } else { m };
                self.payoff_unchecked(s, others_nc)
            })
            .collect())
    }

    /// True when every player does at least as well under `a` as under `b`
    /// and someone does strictly better.
    pub fn pareto_dominates(&self, a: &OutcomeProfile, b: &OutcomeProfile) -> Result<bool> {
        let pa = self.profile_payoffs(a)?;
        let pb = self.profile_payoffs(b)?;
        let weakly = pa.iter().zip(&pb).all(|(x, y)| x >= y);
        let strictly = pa.iter().zip(&pb).any(|(x, y)| x > y);
        Ok(weakly && strictly)
    }

    fn check_len(&self, profile: &OutcomeProfile) -> Result<()> {
        if profile.len() != self.n {
            return Err(Error::LengthMismatch {
                expected: self.n,
                actual: profile.len(),
            });
        }
        Ok(())
    }
}

/// Outcome of the exhaustive structural checks. All six hold for any valid
/// game.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct StructureReport {
    /// C strictly beats NC at every `k`.
    pub dominance: bool,
    /// Both payoff curves strictly increase in `k`.
    pub monotonicity: bool,
    /// No payoff is negative.
    pub nonnegativity: bool,
    /// `f(NC, n-1) > f(C, 0)`: universal NC beats universal C.
    pub pareto_relation: bool,
    /// Welfare and the NC payoff both grow with one more NC traveler.
    pub desirability: bool,
    /// `f(NC, k') > f(C, 0)` exactly when `k' >= k* - 1`.
    pub k_star_sandwich: bool,
}

impl StructureReport {
    pub fn all(&self) -> bool {
        self.dominance
            && self.monotonicity
            && self.nonnegativity
            && self.pareto_relation
            && self.desirability
            && self.k_star_sandwich
    }
}

/// A pure-strategy profile, one action per player.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct OutcomeProfile(Vec<Strategy>);

impl OutcomeProfile {
    pub fn new(strategies: Vec<Strategy>) -> Self {
        OutcomeProfile(strategies)
    }

    pub fn uniform(n: usize, s: Strategy) -> Self {
        OutcomeProfile(vec![s; n])
    }

    /// Players `0..m` choose NC, the rest choose C.
    pub fn with_nc_prefix(n: usize, m: usize) -> Self {
        OutcomeProfile(
            (0..n)
                .map(|i| if i < m { Strategy::NC } else { Strategy::C })
                .collect(),
        )
    }

    /// NC for exactly the listed players.
    pub fn from_coalition(n: usize, coalition: &[usize]) -> Self {
        let mut v = vec![Strategy::C; n];
        for &i in coalition {
            if i < n {
                v[i] = Strategy::NC;
            }
        }
        OutcomeProfile(v)
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn strategies(&self) -> &[Strategy] {
        &self.0
    }

    /// Number of NC players, `m`.
    pub fn nc_count(&self) -> usize {
        self.0.iter().filter(|&&s| s == Strategy::NC).count()
    }

    /// Indices of NC players.
    pub fn coalition(&self) -> Vec<usize> {
        self.0
            .iter()
            .enumerate()
            .filter(|(_, &s)| s == Strategy::NC)
            .map(|(i, _)| i)
            .collect()
    }
}
