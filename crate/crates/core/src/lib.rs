//! Analysis toolkit for the n-player social-mobility dilemma of connected
//! and automated vehicle (CAV) travel.
//!
//! * [`game`]: payoffs, dominance and Pareto structure, the threshold `k*`;
//! * [`erc`]: ERC preferences, the cooperation ratio `delta(k)` and Nash
//!   coalition checks;
//! * [`institutions`]: the incentive ratio `beta`, participation probability
//!   `t(n)` and agreement / insider / free-rider probabilities;
//! * [`simulate`]: Monte Carlo and best-response cross-checks.

pub mod binomial;
pub mod erc;
pub mod error;
pub mod game;
pub mod institutions;
pub mod simulate;

pub use erc::{EquilibriumReport, ErcType, Population};
pub use error::{Error, Result};
pub use game::{GameParams, OutcomeProfile, Strategy, StructureReport};
pub use institutions::{InstitutionSolution, Regime, RootBracket, SolveOptions};
pub use simulate::{DynamicsTrace, SimConfig, SimReport};
