//! Stochastic and dynamical cross-checks: Monte Carlo of the participation
//! stage and synchronous best-response dynamics under ERC preferences.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::erc::{utility_of_choice, Population};
use crate::error::{Error, Result};
use crate::game::{GameParams, OutcomeProfile, Strategy};

/// Trials drawn from one generator stream.
pub const TRIALS_PER_BLOCK: u64 = 4096;

/// Identifies the random source so counts can be reproduced elsewhere.
pub const RNG_ALGORITHM: &str =
    "chacha8(seed_from_u64(seed), stream=block_index, 4096 trials/block, bernoulli: next_f64 < t)";

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct SimConfig {
    pub trials: u64,
    pub seed: u64,
    pub shards: usize,
}

impl SimConfig {
    pub fn new(trials: u64, seed: u64, shards: usize) -> Self {
        SimConfig {
            trials: trials.max(1),
            seed,
            shards: shards.max(1),
        }
    }
}

/// One estimated probability.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Estimate {
    pub quantity: &'static str,
    pub hits: u64,
    pub estimate: f64,
    pub stderr: f64,
}

impl Estimate {
    fn from_hits(quantity: &'static str, hits: u64, trials: u64) -> Self {
        let p = hits as f64 / trials as f64;
        Estimate {
            quantity,
            hits,
            estimate: p,
            stderr: (p * (1.0 - p) / trials as f64).sqrt(),
        }
    }
}

/// Flat per-quantity record for serialization.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SimRecord {
    pub quantity: &'static str,
    pub estimate: f64,
    pub stderr: f64,
    pub trials: u64,
    pub seed: u64,
    pub rng_algorithm: &'static str,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SimReport {
    pub n: usize,
    pub k_star: usize,
    pub t: f64,
    pub trials: u64,
    pub seed: u64,
    pub shards: usize,
    pub rng_algorithm: &'static str,
    pub p_agree: Estimate,
    pub p_insider: Estimate,
    pub p_freerider: Estimate,
}

impl SimReport {
    pub fn estimates(&self) -> [&Estimate; 3] {
        [&self.p_agree, &self.p_insider, &self.p_freerider]
    }

    pub fn records(&self) -> Vec<SimRecord> {
        self.estimates()
            .into_iter()
            .map(|e| SimRecord {
                quantity: e.quantity,
                estimate: e.estimate,
                stderr: e.stderr,
                trials: self.trials,
                seed: self.seed,
                rng_algorithm: self.rng_algorithm,
            })
            .collect()
    }
}

#[derive(Clone, Copy, Default)]
struct Counts {
    agree: u64,
    insider: u64,
    freerider: u64,
}

impl std::ops::Add for Counts {
    type Output = Counts;
    fn add(self, o: Counts) -> Counts {
        Counts {
            agree: self.agree + o.agree,
            insider: self.insider + o.insider,
            freerider: self.freerider + o.freerider,
        }
    }
}

fn run_block(n: usize, k_star: usize, t: f64, seed: u64, block: u64, trials: u64) -> Counts {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(block);
    let mut counts = Counts::default();
    for _ in 0..trials {
        // player 0 is the tagged player
        let tagged = rng.gen::<f64>() < t;
        let mut participants = usize::from(tagged);
        for _ in 1..n {
            if rng.gen::<f64>() < t {
                participants += 1;
            }
        }
        if participants >= k_star {
            counts.agree += 1;
            if tagged {
                counts.insider += 1;
            } else {
                counts.freerider += 1;
            }
        }
    }
    counts
}

/// Simulates `cfg.trials` rounds of independent participation with
/// probability `t` and estimates the agreement, insider and free-rider
/// probabilities for player 0.
///
/// Trials are split into fixed blocks of [`TRIALS_PER_BLOCK`], each with its
/// own generator stream; shards take contiguous runs of blocks, so the
/// result does not depend on the shard count.
pub fn mc_participation(g: &GameParams, t: f64, cfg: SimConfig) -> Result<SimReport> {
    if !(0.0..=1.0).contains(&t) {
        return Err(Error::OutOfRangeT { t });
    }
    let (n, k_star) = (g.n(), g.k_star());
    let trials = cfg.trials.max(1);
    let blocks = trials.div_ceil(TRIALS_PER_BLOCK);
    let shards = (cfg.shards.max(1) as u64).min(blocks);

    let counts = (0..shards)
        .into_par_iter()
        .map(|s| {
            let first = s * blocks / shards;
            let last = (s + 1) * blocks / shards;
            (first..last)
                .map(|b| {
                    let start = b * TRIALS_PER_BLOCK;
                    let len = TRIALS_PER_BLOCK.min(trials - start);
                    run_block(n, k_star, t, cfg.seed, b, len)
                })
                .fold(Counts::default(), |a, c| a + c)
        })
        .reduce(Counts::default, |a, c| a + c);

    Ok(SimReport {
        n,
        k_star,
        t,
        trials,
        seed: cfg.seed,
        shards: cfg.shards.max(1),
        rng_algorithm: RNG_ALGORITHM,
        p_agree: Estimate::from_hits("p_agree", counts.agree, trials),
        p_insider: Estimate::from_hits("p_insider", counts.insider, trials),
        p_freerider: Estimate::from_hits("p_freerider", counts.freerider, trials),
    })
}

/// Trajectory of synchronous best-response dynamics.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct DynamicsTrace {
    /// NC count of the initial profile followed by one entry per round.
    pub nc_counts: Vec<usize>,
    /// Players that switched in each round.
    pub switches: Vec<usize>,
    pub rounds: usize,
    pub fixed_point: bool,
    pub final_profile: OutcomeProfile,
}

/// One synchronous round: every player best-responds to the others'
/// current strategies, keeping the current strategy on ties.
pub fn best_response_round(
    g: &GameParams,
    pop: &Population,
    profile: &OutcomeProfile,
) -> OutcomeProfile {
    let m = profile.nc_count();
    let next = profile
        .strategies()
        .iter()
        .zip(&pop.types)
        .map(|(&s, &t)| {
            let others = if s == Strategy::NC { m - 1 } else { m };
            let u_nc = utility_of_choice(g, t, Strategy::NC, others);
            let u_c = utility_of_choice(g, t, Strategy::C, others);
            if u_nc > u_c {
                Strategy::NC
            } else if u_c > u_nc {
                Strategy::C
            } else {
                s
            }
        })
        .collect();
    OutcomeProfile::new(next)
}

/// Runs synchronous best-response rounds from `initial` until no player
/// switches or `max_rounds` rounds have run.
pub fn best_response_dynamics(
    g: &GameParams,
    pop: &Population,
    initial: &OutcomeProfile,
    max_rounds: usize,
) -> Result<DynamicsTrace> {
    let n = g.n();
    for len in [pop.len(), initial.len()] {
        if len != n {
            return Err(Error::LengthMismatch {
                expected: n,
                actual: len,
            });
        }
    }
    let mut profile = initial.clone();
    let mut nc_counts = vec![profile.nc_count()];
    let mut switches = Vec::new();
    let mut fixed_point = false;
    for _ in 0..max_rounds.max(1) {
        let next = best_response_round(g, pop, &profile);
        let changed = profile
            .strategies()
            .iter()
            .zip(next.strategies())
            .filter(|(a, b)| a != b)
            .count();
        switches.push(changed);
        nc_counts.push(next.nc_count());
        profile = next;
        if changed == 0 {
            fixed_point = true;
            break;
        }
    }
    Ok(DynamicsTrace {
        rounds: switches.len(),
        nc_counts,
        switches,
        fixed_point,
        final_profile: profile,
    })
}

/// A uniformly random pure profile.
pub fn random_profile<R: Rng + ?Sized>(n: usize, rng: &mut R) -> OutcomeProfile {
    OutcomeProfile::new(
        (0..n)
            .map(|_| {
                if rng.gen::<bool>() {
                    Strategy::NC
                } else {
                    Strategy::C
                }
            })
            .collect(),
    )
}
