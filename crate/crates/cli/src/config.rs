use std::path::PathBuf;

use clap::{Parser, ValueEnum};

use crate::error::CliError;

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum CommandKind {
    /// Derived quantities, structure checks and institution solution for one game
    Analyze,
    /// Numerical study table over player counts
    Table1,
    /// Payoff curves f(NC, k) and f(C, k)
    Fig1,
    /// Participation probability t(n) over a range of n
    Fig2,
    /// Monte Carlo estimate of the participation probabilities
    Mc,
    /// Best-response dynamics from random initial profiles
    Dynamics,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Csv,
    Json,
}

/// Reproduce and analyze the n-player CAV travel dilemma.
///
/// Set DILEMMA_LOG=error|info|debug for diagnostics on standard error.
#[derive(Clone, Debug, Parser)]
#[command(name = "dilemma", version)]
pub struct RunConfig {
    #[arg(value_enum)]
    pub command: CommandKind,
    /// Number of players
    #[arg(long)]
    pub n: Option<usize>,
    /// Base commute benefit
    #[arg(long)]
    pub c: Option<f64>,
    /// CAV benefit premium
    #[arg(long)]
    pub d: Option<f64>,
    /// Premium for table1/fig2 (defaults to the value back-solved from the table)
    #[arg(long)]
    pub d0: Option<f64>,
    #[arg(long = "n-min")]
    pub n_min: Option<usize>,
    #[arg(long = "n-max")]
    pub n_max: Option<usize>,
    #[arg(long)]
    pub seed: Option<u64>,
    /// Monte Carlo trials (mc) or number of random initial profiles (dynamics)
    #[arg(long)]
    pub trials: Option<u64>,
    /// Independent work partitions for mc; results do not depend on it
    #[arg(long)]
    pub shards: Option<usize>,
    /// Participation probability for mc (defaults to the solved t(n))
    #[arg(long)]
    pub t: Option<f64>,
    /// Population JSON file ({"types": [{"a": .., "b": ..}, ..]}) for analyze/dynamics
    #[arg(long)]
    pub population: Option<PathBuf>,
    #[arg(long, value_enum)]
    pub format: Option<Format>,
    /// Write data here instead of standard output
    #[arg(long)]
    pub output: Option<PathBuf>,
}

impl RunConfig {
    /// Checks command-specific flags before any computation.
    pub fn validate(&self) -> Result<(), CliError> {
        use CommandKind::*;
        let missing = |flag: &str| {
            Err(CliError::Usage(format!(
                "missing required flag --{flag} for {}",
                self.command_name()
            )))
        };
        match self.command {
            Analyze => {
                if self.n.is_none() {
                    return missing("n");
                }
                if self.c.is_none() {
                    return missing("c");
                }
                if self.d.is_none() {
                    return missing("d");
                }
            }
            Mc | Dynamics => {
                if self.n.is_none() {
                    return missing("n");
                }
            }
            Table1 | Fig1 | Fig2 => {}
        }
        if let (Some(lo), Some(hi)) = (self.n_min, self.n_max) {
            if lo > hi {
                return Err(CliError::Usage(format!(
                    "--n-min {lo} exceeds --n-max {hi}"
                )));
            }
        }
        if let Some(t) = self.t {
            if !(0.0..=1.0).contains(&t) {
                return Err(CliError::Usage(format!("--t {t} outside [0, 1]")));
            }
        }
        if self.trials == Some(0) {
            return Err(CliError::Usage("--trials must be positive".into()));
        }
        if self.shards == Some(0) {
            return Err(CliError::Usage("--shards must be positive".into()));
        }
        Ok(())
    }

    pub fn command_name(&self) -> &'static str {
        match self.command {
            CommandKind::Analyze => "analyze",
            CommandKind::Table1 => "table1",
            CommandKind::Fig1 => "fig1",
            CommandKind::Fig2 => "fig2",
            CommandKind::Mc => "mc",
            CommandKind::Dynamics => "dynamics",
        }
    }

    pub fn format_or(&self, default: Format) -> Format {
        self.format.unwrap_or(default)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn parse(args: &[&str]) -> RunConfig {
        RunConfig::try_parse_from(std::iter::once("dilemma").chain(args.iter().copied())).unwrap()
    }

    #[test]
    fn analyze_needs_all_parameters() {
        assert!(parse(&["analyze", "--n", "5", "--c", "6"])
            .validate()
            .is_err());
        assert!(parse(&["analyze", "--n", "5", "--c", "6", "--d", "3"])
            .validate()
            .is_ok());
    }

    #[test]
    fn range_and_counts_checked() {
        assert!(parse(&["table1", "--n-min", "5", "--n-max", "4"])
            .validate()
            .is_err());
        assert!(parse(&["mc", "--n", "5", "--trials", "0"])
            .validate()
            .is_err());
        assert!(parse(&["mc", "--n", "5", "--shards", "0"])
            .validate()
            .is_err());
        assert!(parse(&["mc", "--n", "5", "--t=-0.1"]).validate().is_err());
        assert!(parse(&["fig1"]).validate().is_ok());
    }

    #[test]
    fn format_default_applies_when_unset() {
        assert_eq!(parse(&["fig1"]).format_or(Format::Csv), Format::Csv);
        assert_eq!(
            parse(&["fig1", "--format", "json"]).format_or(Format::Csv),
            Format::Json
        );
    }
}
