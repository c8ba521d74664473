use thiserror::Error;

/// Errors raised by the simulator core.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid spin quantum number {0}: 2J must be a positive integer")]
    InvalidSpin(f64),

    #[error("invalid parameter `{field}`: {reason}")]
    InvalidParameter { field: &'static str, reason: String },

    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("state vector has zero norm")]
    ZeroNorm,

    #[error("variance {0:e} is negative beyond roundoff")]
    NegativeVariance(f64),

    #[error("expectation value has imaginary part {0:e}; operator is not Hermitian")]
    NonHermitian(f64),

    #[error("eigensolver failed to converge after {0} iterations")]
    NoConvergence(usize),
}

impl Error {
    pub(crate) fn param(field: &'static str, reason: impl Into<String>) -> Self {
        Error::InvalidParameter {
            field,
            reason: reason.into(),
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
