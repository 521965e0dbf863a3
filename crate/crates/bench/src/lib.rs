//! Shared fixtures for the criterion benchmarks.

use dilemma_core::institutions::{default_c, table1_d0};
use dilemma_core::GameParams;

/// Valid games at the study's premium for every `n` in `ns`.
pub fn games_at_d0(ns: impl IntoIterator<Item = usize>) -> Vec<GameParams> {
    let d = table1_d0();
    ns.into_iter()
        .filter_map(|n| GameParams::new(n, default_c(d), d).ok())
        .collect()
}
