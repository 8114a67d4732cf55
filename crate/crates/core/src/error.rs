//! Crate-wide error type.

/// Errors produced by estimation, sampling and interval construction.
#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum Error {
    /// A parameter or argument violates its domain (nonpositive scale, u outside (0,1), ...).
    #[error("domain error: {0}")]
    Domain(String),

    /// A censoring plan violates its invariants.
    #[error("invalid censoring plan: {0}")]
    InvalidPlan(String),

    /// A censored sample violates its invariants.
    #[error("invalid sample: {0}")]
    InvalidSample(String),

    /// An objective evaluated to a nonfinite value on inputs that should be admissible.
    #[error("evaluation failed: {0}")]
    Evaluation(String),

    /// The observed information matrix could not be inverted.
    #[error("singular observed information matrix")]
    SingularInformation,

    /// Not enough post-burn-in draws for the requested summary.
    #[error("chain too short: need {need} post-burn-in draws, have {have}")]
    ChainTooShort { need: usize, have: usize },

    /// Too many bootstrap refits failed to produce a usable resample distribution.
    #[error("too many bootstrap refit failures: {failed} of {total}")]
    TooManyRefitFailures { failed: usize, total: usize },
}

pub type Result<T> = std::result::Result<T, Error>;
