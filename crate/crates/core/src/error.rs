//! Crate-wide error type.

use thiserror::Error;

/// Errors reported by construction, encoding, and decoding operations.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    /// A sequence length that must be a power of two is not.
    #[error("length {0} is not a power of two")]
    InvalidLength(usize),

    /// A numeric parameter is outside its admissible range.
    #[error("{name} = {value} is outside {range}")]
    Domain {
        name: &'static str,
        value: f64,
        range: &'static str,
    },

    /// Mismatched or inconsistent arguments.
    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    /// A required precondition does not hold (e.g. missing state labels).
    #[error("precondition violated: {0}")]
    Precondition(String),

    /// A constraint that should hold by construction was violated.
    #[error("constraint violated: {0}")]
    Constraint(String),
}

pub type Result<T> = std::result::Result<T, Error>;
