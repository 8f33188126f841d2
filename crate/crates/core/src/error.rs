use thiserror::Error;

/// Errors raised by the simulation library.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("dimension mismatch: expected {expected}, got {actual}")]
    DimensionMismatch { expected: usize, actual: usize },

    #[error("dimension {dim} exceeds the configured cap of {cap}")]
    CapExceeded { dim: usize, cap: usize },

    #[error("invalid qubit index set {indices:?} for a {n}-qubit register")]
    InvalidIndexSet { indices: Vec<usize>, n: usize },

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    /// A numeric invariant (hermiticity, trace, positivity, unitarity,
    /// probability normalization) failed beyond tolerance.
    #[error("numeric invariant violated: {0}")]
    Numeric(String),
}

impl Error {
    pub fn is_numeric(&self) -> bool {
        matches!(self, Error::Numeric(_))
    }
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
