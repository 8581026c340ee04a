use thiserror::Error;

use crate::algebra::BasisTag;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    /// A complex exponential would leave the floating-point range.
    #[error("range error: {0}")]
    Range(String),

    #[error("unsupported degree {degree} (maximum {max})")]
    UnsupportedDegree { degree: usize, max: usize },

    #[error("basis mismatch: {left} vs {right}")]
    BasisMismatch { left: BasisTag, right: BasisTag },

    #[error("invariant violated: {0}")]
    Invariant(String),
}
