//! ERC (equity, reciprocity, competition) preferences over the base game.
//!
//! A player of type `(a, b)` values an outcome as
//! `a * f - b * (sigma - 1/n)^2 / 2`, where `f` is the pecuniary payoff and
//! `sigma` the player's share of the total payout. The ratio `a / b` decides
//! whether joining a group of NC travelers is worthwhile: a player prefers to
//! be the `(k+1)`-th NC traveler iff `a / b <= delta(k)`.
//!
//! Utilities here follow the aggregate convention of the threshold
//! condition: an NC player in a group of `m` NC travelers is paid
//! `f(NC, m)` out of the total `gamma(m) = n*f(C, m) - m*alpha`, while a C
//! player facing `m` NC travelers is paid `f(C, m)` out of `gamma(m)`.

use std::collections::BTreeSet;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::game::{GameParams, OutcomeProfile, Strategy};

/// Slack toward acceptance in the closed equilibrium inequalities.
pub const EQUILIBRIUM_SLACK: f64 = 1e-12;

/// Largest `n` for which [`equilibrium_coalition_sizes_exhaustive`] runs.
pub const EXHAUSTIVE_MAX_N: usize = 15;

/// Weights on pecuniary payoff (`a`) and relative standing (`b`).
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ErcType {
    pub a: f64,
    pub b: f64,
}

impl ErcType {
    pub fn new(a: f64, b: f64) -> Result<Self> {
        let t = ErcType { a, b };
        t.validate()?;
        Ok(t)
    }

    /// Purely pecuniary player, `b = 0`.
    pub fn selfish() -> Self {
        ErcType { a: 1.0, b: 0.0 }
    }

    /// Purely relative player, `a = 0`.
    pub fn relativist() -> Self {
        ErcType { a: 0.0, b: 1.0 }
    }

    pub fn validate(&self) -> Result<()> {
        let ok = self.a.is_finite()
            && self.b.is_finite()
            && self.a >= 0.0
            && self.b >= 0.0
            && (self.a > 0.0 || self.b > 0.0);
        if ok {
            Ok(())
        } else {
            Err(Error::InvalidErcType {
                a: self.a,
                b: self.b,
            })
        }
    }

    /// `a / b`, or `+inf` for a purely pecuniary type.
    pub fn ratio(&self) -> f64 {
        if self.b == 0.0 {
            f64::INFINITY
        } else {
            self.a / self.b
        }
    }
}

/// One ERC type per player.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Population {
    pub types: Vec<ErcType>,
}

impl Population {
    pub fn new(types: Vec<ErcType>) -> Result<Self> {
        for t in &types {
            t.validate()?;
        }
        Ok(Population { types })
    }

    pub fn uniform(n: usize, t: ErcType) -> Self {
        Population { types: vec![t; n] }
    }

    pub fn selfish(n: usize) -> Self {
        Self::uniform(n, ErcType::selfish())
    }

    pub fn len(&self) -> usize {
        self.types.len()
    }

    pub fn is_empty(&self) -> bool {
        self.types.is_empty()
    }

    fn check_against(&self, g: &GameParams) -> Result<()> {
        if self.types.len() != g.n() {
            return Err(Error::LengthMismatch {
                expected: g.n(),
                actual: self.types.len(),
            });
        }
        for t in &self.types {
            t.validate()?;
        }
        Ok(())
    }
}

/// Share of the total payout `gamma` received by a player paid `f_i`;
/// `1/n` when nothing is paid out.
pub fn relative_share(f_i: f64, gamma: f64, n: usize) -> Result<f64> {
    if gamma < 0.0 || gamma.is_nan() {
        return Err(Error::NegativeGamma { gamma });
    }
    if gamma == 0.0 {
        Ok(1.0 / n as f64)
    } else {
        Ok(f_i / gamma)
    }
}

/// Pecuniary part of the adjusted utility.
pub fn pecuniary(f_i: f64) -> f64 {
    f_i
}

/// Comparative part, maximal (zero) at the equal share.
pub fn comparative(sigma: f64, n: usize) -> f64 {
    let gap = sigma - 1.0 / n as f64;
    -0.5 * gap * gap
}

/// `a * f_i - b * (sigma - 1/n)^2 / 2`.
pub fn adjusted_utility(t: ErcType, f_i: f64, sigma: f64, n: usize) -> f64 {
    t.a * pecuniary(f_i) + t.b * comparative(sigma, n)
}

/// Pecuniary payoff and payout share of a player choosing `s` when the
/// group of NC travelers (counting the player if `s` is NC) has size `m`.
fn standing(g: &GameParams, s: Strategy, m: usize) -> (f64, f64) {
    let f = g.payoff_unchecked(s, m);
    let gamma = g.social_welfare_unchecked(m);
    // gamma(m) >= n(c - 1) > 0 for valid games
    (f, f / gamma)
}

/// Adjusted utility of type `t` choosing `s` when `others_nc` other players
/// choose NC.
pub fn utility_of_choice(g: &GameParams, t: ErcType, s: Strategy, others_nc: usize) -> f64 {
    let m = match s {
        Strategy::NC => others_nc + 1,
        Strategy::C => others_nc,
    };
    let (f, sigma) = standing(g, s, m);
    adjusted_utility(t, f, sigma, g.n())
}

/// Critical ratio below which a player facing `k` NC travelers prefers to
/// join them:
///
/// ```text
/// delta(k) = [r(f(NC,k+1)/gamma(k+1)) - r(f(C,k)/gamma(k))] / [f(C,k) - f(NC,k+1)]
/// ```
///
/// Defined for `0 <= k <= n-1`; `k = n-1` is the last player joining.
pub fn delta(g: &GameParams, k: usize) -> Result<f64> {
    let n = g.n();
    if k + 1 > n {
        return Err(Error::OutOfRangeK {
            k,
            min: 0,
            max: n - 1,
        });
    }
    let (f_nc, s_nc) = standing(g, Strategy::NC, k + 1);
    let (f_c, s_c) = standing(g, Strategy::C, k);
    let denom = pecuniary(f_c) - pecuniary(f_nc);
    if denom <= 0.0 {
        return Err(Error::DegenerateDenominator { k, value: denom });
    }
    Ok((comparative(s_nc, n) - comparative(s_c, n)) / denom)
}

/// The denominator of [`delta`], `d - 2*phi`, independent of `k`.
pub fn delta_denominator(g: &GameParams) -> f64 {
    g.d() - 2.0 * g.phi()
}

/// Left-hand side of the cooperation condition
///
/// ```text
/// n[(k-1) f(C,k) - k f(C,k-1)] + [n f(C,k-1) - (k-1) alpha][2k - n]
/// ```
///
/// which is positive exactly when `delta(k-1) > 0`. Defined for `2 <= k <= n`.
pub fn necessary_condition_value(g: &GameParams, k: usize) -> Result<f64> {
    let n = g.n();
    if k < 2 || k > n {
        return Err(Error::OutOfRangeK { k, min: 2, max: n });
    }
    let nf = n as f64;
    let kf = k as f64;
    let fc = |j| g.payoff_unchecked(Strategy::C, j);
    let first = (kf - 1.0) * fc(k) - kf * fc(k - 1);
    let second = nf * fc(k - 1) - (kf - 1.0) * g.alpha();
    Ok(nf * first + second * (2.0 * kf - nf))
}

/// Nash test for the coalition of NC travelers `coalition` (player indices):
/// members need `ratio <= delta(k-1)`, outsiders need `ratio >= delta(k)`.
pub fn is_equilibrium(g: &GameParams, pop: &Population, coalition: &[usize]) -> Result<bool> {
    pop.check_against(g)?;
    let n = g.n();
    let mut member = vec![false; n];
    for &i in coalition {
        if i >= n {
            return Err(Error::IndexOutOfRange { index: i, n });
        }
        member[i] = true;
    }
    let k = member.iter().filter(|&&m| m).count();
    let join_bound = if k >= 1 { Some(delta(g, k - 1)?) } else { None };
    let stay_bound = if k < n { Some(delta(g, k)?) } else { None };

    Ok(pop.types.iter().zip(&member).all(|(t, &inside)| {
        let r = t.ratio();
        if inside {
            join_bound.is_some_and(|bound| r <= bound + EQUILIBRIUM_SLACK)
        } else {
            stay_bound.is_some_and(|bound| r >= bound - EQUILIBRIUM_SLACK)
        }
    }))
}

/// Same as [`is_equilibrium`] for a strategy profile.
pub fn is_equilibrium_profile(
    g: &GameParams,
    pop: &Population,
    profile: &OutcomeProfile,
) -> Result<bool> {
    if profile.len() != g.n() {
        return Err(Error::LengthMismatch {
            expected: g.n(),
            actual: profile.len(),
        });
    }
    is_equilibrium(g, pop, &profile.coalition())
}

/// Player indices ordered by ratio, ties broken by index.
pub fn players_by_ratio(pop: &Population) -> Vec<usize> {
    let mut idx: Vec<usize> = (0..pop.len()).collect();
    idx.sort_by(|&i, &j| {
        pop.types[i]
            .ratio()
            .total_cmp(&pop.types[j].ratio())
            .then(i.cmp(&j))
    });
    idx
}

/// Every coalition size `k` admitting an equilibrium.
///
/// Only the `k` lowest-ratio players are tried for each size: swapping a
/// member for a lower-ratio outsider never breaks either inequality, so a
/// size admits some equilibrium iff it admits this one.
pub fn equilibrium_coalition_sizes(g: &GameParams, pop: &Population) -> Result<BTreeSet<usize>> {
    pop.check_against(g)?;
    let order = players_by_ratio(pop);
    let mut sizes = BTreeSet::new();
    for k in 0..=g.n() {
        if is_equilibrium(g, pop, &order[..k])? {
            sizes.insert(k);
        }
    }
    Ok(sizes)
}

/// Brute force over all `2^n` coalitions; validates the sorted-prefix
/// shortcut for small games.
pub fn equilibrium_coalition_sizes_exhaustive(
    g: &GameParams,
    pop: &Population,
) -> Result<BTreeSet<usize>> {
    pop.check_against(g)?;
    let n = g.n();
    if n > EXHAUSTIVE_MAX_N {
        return Err(Error::ExhaustiveTooLarge {
            n,
            max: EXHAUSTIVE_MAX_N,
        });
    }
    let mut sizes = BTreeSet::new();
    let mut coalition = Vec::with_capacity(n);
    for mask in 0u32..(1u32 << n) {
        coalition.clear();
        coalition.extend((0..n).filter(|i| mask & (1 << i) != 0));
        if !sizes.contains(&coalition.len()) && is_equilibrium(g, pop, &coalition)? {
            sizes.insert(coalition.len());
        }
    }
    Ok(sizes)
}

/// Summary of the ERC analysis of one game for reporting.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct EquilibriumReport {
    /// `delta(k)` for `k = 0..n-1`.
    pub delta: Vec<f64>,
    /// Smallest `k >= 1` with `delta(k-1) > 0`, i.e. the smallest coalition
    /// size that some population could sustain.
    pub min_supportable_coalition: Option<usize>,
    /// Equilibrium coalition sizes for the supplied population.
    pub equilibrium_sizes: Vec<usize>,
}

pub fn equilibrium_report(g: &GameParams, pop: &Population) -> Result<EquilibriumReport> {
    let delta: Vec<f64> = (0..g.n()).map(|k| delta(g, k)).collect::<Result<_>>()?;
    let min_supportable_coalition = (1..=g.n()).find(|&k| delta[k - 1] > 0.0);
    let equilibrium_sizes = equilibrium_coalition_sizes(g, pop)?.into_iter().collect();
    Ok(EquilibriumReport {
        delta,
        min_supportable_coalition,
        equilibrium_sizes,
    })
}
