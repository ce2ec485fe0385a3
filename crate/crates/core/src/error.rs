//! Error type shared by every module.

/// Crate-wide result alias.
pub type Result<T> = std::result::Result<T, Error>;

/// Domain errors. Message strings name the violated precondition.
#[derive(Debug, Clone, thiserror::Error)]
pub enum Error {
    #[error("center not interior")]
    CenterNotInterior,

    #[error("degenerate body")]
    DegenerateBody,

    /// Iteration cap exceeded; carries the best iterate found so far.
    #[error("no convergence (best iterate {best:?}, value {value})")]
    NoConvergence { best: Vec<f64>, value: f64 },

    #[error("empty effective domain")]
    EmptyEffectiveDomain,

    #[error("vacuous")]
    Vacuous,

    #[error("not log-concave")]
    NotLogConcave,

    #[error("not non-increasing")]
    NotNonIncreasing,

    #[error("not integrable")]
    NotIntegrable,

    #[error("R out of range")]
    ROutOfRange,

    #[error("degenerate pair")]
    DegeneratePair,

    #[error("unbounded/degenerate radial")]
    DegenerateRadial,

    #[error("hypothesis violated")]
    HypothesisViolated,

    #[error("precondition violated: {0}")]
    PreconditionViolated(String),

    #[error("invalid input: {0}")]
    InvalidInput(String),
}

impl Error {
    pub fn invalid(msg: impl Into<String>) -> Self {
        Error::InvalidInput(msg.into())
    }

    pub fn precondition(msg: impl Into<String>) -> Self {
        Error::PreconditionViolated(msg.into())
    }
}
