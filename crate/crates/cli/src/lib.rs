//! Command-line front end: reproduces the numerical study (table, payoff
//! curves, participation sequence) and runs one-off analyses.

pub mod commands;
pub mod config;
pub mod error;
pub mod output;

pub use config::{CommandKind, Format, RunConfig};
pub use error::CliError;
