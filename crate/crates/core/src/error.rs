use thiserror::Error;

/// Errors raised by rule construction, evaluation and verification.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("domain error: {0}")]
    Domain(String),

    #[error("unsupported degree {degree}: explicit formula requires degree >= {min}")]
    UnsupportedDegree { degree: usize, min: usize },

    #[error("numeric failure at index {index}: {reason}")]
    NumericFailure { index: usize, reason: String },

    #[error("ill-conditioned input: {0}")]
    IllConditioned(String),

    #[error("oracle imprecise: {0}")]
    OracleImprecise(String),
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn invalid(msg: impl Into<String>) -> Error {
    Error::InvalidArgument(msg.into())
}
