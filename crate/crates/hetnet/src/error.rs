//! Crate-wide error type.

use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    /// A state or parameter value is NaN/inf where a finite number is required.
    #[error("non-finite input: {0}")]
    NonFinite(String),

    /// Model parameters violate the solvability invariants (a1 != 0 etc.).
    #[error("invalid parameters: {0}")]
    InvalidParams(String),

    /// An equilibrium class required by the caller does not exist for these
    /// parameters (its amplitude equation has no real root).
    #[error("equilibrium class {0} absent: {1}")]
    AbsentEquilibrium(&'static str, String),

    /// Input lies outside a classifier's stated hypotheses.
    #[error("outside hypothesis: {0}")]
    OutsideHypothesis(String),

    /// A formula denominator vanished; names the offending eigenvalue.
    #[error("zero denominator: eigenvalue {0} vanishes in {1}")]
    ZeroDenominator(&'static str, &'static str),

    /// Premises of a cycle/network statement do not hold for these parameters.
    #[error("premises violated: {0}")]
    PremisesViolated(String),

    /// The adaptive integrator could not continue (step-size underflow).
    #[error("integration failed: {0}")]
    Integration(String),

    /// Too few usable section crossings for a regression.
    #[error("too few crossings: got {got}, need {need}")]
    TooFewCrossings { got: usize, need: usize },

    /// Rejection search exhausted its budget; carries a histogram of the
    /// most-violated constraints, formatted one per line.
    #[error("search exhausted after {tries} tries; most-violated constraints:\n{histogram}")]
    SearchExhausted { tries: u64, histogram: String },

    /// A numerical check contradicted the verdict it was testing.
    #[error("check failed: {0}")]
    CheckFailed(String),

    /// Malformed run configuration.
    #[error("config error: {0}")]
    Config(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}
