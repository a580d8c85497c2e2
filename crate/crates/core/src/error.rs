use thiserror::Error;

/// Errors produced by the `ong-core` operations.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum OngError {
    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("nearest-neighbour query on an empty index")]
    EmptyIndex,

    #[error("contract violation: {0}")]
    ContractViolation(String),

    #[error("unsupported dimension {0}")]
    UnsupportedDimension(usize),

    /// A closed form was requested outside the parameter range where it exists.
    #[error("regime error: {0}")]
    Regime(String),

    #[error("insufficient data: {0}")]
    InsufficientData(String),

    #[error("non-finite sample {0}")]
    NonFinite(f64),

    /// The grid index and the brute-force oracle disagreed on a query.
    #[error(
        "oracle mismatch: grid answered ({grid_index}, {grid_sq}), brute force answered ({oracle_index}, {oracle_sq})"
    )]
    OracleMismatch {
        grid_index: usize,
        grid_sq: f64,
        oracle_index: usize,
        oracle_sq: f64,
    },
}

pub type Result<T> = std::result::Result<T, OngError>;

pub(crate) fn check_dim(expected: usize, found: usize) -> Result<()> {
    if expected == found {
        Ok(())
    } else {
        Err(OngError::DimensionMismatch { expected, found })
    }
}
