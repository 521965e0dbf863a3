use thiserror::Error;

/// Errors produced by game construction and analysis.
///
/// Every message starts with the variant name so command-line users can
/// match on it.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("RejectsNTooSmall: player count n = {n} must exceed 2")]
    RejectsNTooSmall { n: usize },

    #[error("RejectsDConstraint: d*(n-2) = {value} must exceed 2 (n = {n}, d = {d})")]
    RejectsDConstraint { n: usize, d: f64, value: f64 },

    #[error("RejectsCostOrder: c = {c} must exceed e = d + 1 = {e}")]
    RejectsCostOrder { c: f64, e: f64 },

    #[error("RejectsIntegerRatio: n*d/(d+1) = {ratio} is integral (n = {n}, d = {d})")]
    RejectsIntegerRatio { n: usize, d: f64, ratio: f64 },

    #[error("RejectsNonFinite: parameter {name} = {value} is not a finite real")]
    RejectsNonFinite { name: &'static str, value: f64 },

    #[error("OutOfRangeK: k = {k} outside [{min}, {max}]")]
    OutOfRangeK { k: usize, min: usize, max: usize },

    #[error("OutOfRangeM: m = {m} outside [0, {n}]")]
    OutOfRangeM { m: usize, n: usize },

    #[error("OutOfRangeT: participation probability t = {t} outside [0, 1]")]
    OutOfRangeT { t: f64 },

    #[error("LengthMismatch: expected {expected} players, got {actual}")]
    LengthMismatch { expected: usize, actual: usize },

    #[error("IndexOutOfRange: player index {index} not below n = {n}")]
    IndexOutOfRange { index: usize, n: usize },

    #[error("NegativeGamma: total payout gamma = {gamma} is negative")]
    NegativeGamma { gamma: f64 },

    #[error("DegenerateDenominator: delta({k}) denominator {value} is not positive")]
    DegenerateDenominator { k: usize, value: f64 },

    #[error(
        "InvalidErcType: weights a = {a}, b = {b} must be non-negative, finite and not both zero"
    )]
    InvalidErcType { a: f64, b: f64 },

    #[error("ExhaustiveTooLarge: exhaustive coalition search supports n <= {max}, got {n}")]
    ExhaustiveTooLarge { n: usize, max: usize },

    #[error("NonConvergence: bisection stopped with t in [{t_lo}, {t_hi}] after {iterations} iterations")]
    NonConvergence {
        t_lo: f64,
        t_hi: f64,
        iterations: usize,
    },
}

impl Error {
    /// Parameter validation failures (as opposed to solver failures).
    pub fn is_validation(&self) -> bool {
        !matches!(self, Error::NonConvergence { .. })
    }
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
