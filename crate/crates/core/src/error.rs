use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    /// A matrix that must be inverted or factorized is too close to singular.
    #[error("ill-conditioned matrix (condition number {condition:.3e})")]
    IllConditioned { condition: f64 },

    /// A computed quantity left its physical range, which means the input
    /// state or a convention is broken.
    #[error("numerical failure: {0}")]
    NumericalFailure(String),

    /// Probability mass pushed above the Fock cutoff exceeded the budget.
    #[error("truncation error: tail mass {tail:.3e} exceeds budget {budget:.3e}")]
    Truncation { tail: f64, budget: f64 },

    #[error("resource limit: {0}")]
    ResourceLimit(String),
}

impl Error {
    pub(crate) fn invalid(msg: impl Into<String>) -> Self {
        Error::InvalidArgument(msg.into())
    }
}
