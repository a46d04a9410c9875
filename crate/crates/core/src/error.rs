use thiserror::Error;

/// Errors raised by the solvers in this crate.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("coupling g/omega = {gprime} is outside the allowed range ({reason})")]
    CouplingOutOfRange { gprime: f64, reason: &'static str },

    #[error("eigensolver failed to converge: {0}")]
    NoConvergence(String),

    #[error("grid mismatch: expected {expected} samples, got {got}")]
    GridMismatch { expected: usize, got: usize },

    #[error("need at least {needed} rows, got {got}")]
    InsufficientRows { needed: usize, got: usize },
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn invalid(msg: impl Into<String>) -> Error {
    Error::InvalidParameter(msg.into())
}
