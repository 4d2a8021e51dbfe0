use thiserror::Error;

/// Errors shared by all modules of the crate.
#[derive(Debug, Error)]
pub enum Error {
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),

    #[error("matrix entry is not finite")]
    NonFiniteEntry,

    #[error("SVD did not converge")]
    SvdFailed,

    #[error("generator list is empty")]
    EmptyGenerators,

    #[error("generator must be strictly positive, got {0}")]
    NonpositiveGenerator(String),

    #[error("element {0} lies outside the truncation (cutoff {1})")]
    OutsideTruncation(String, String),

    #[error("bases do not match: {0}")]
    BasisMismatch(String),

    #[error("operator is not a projection (residual {0:.3e})")]
    NotAProjection(f64),

    #[error("operator is not a partial isometry (residual {0:.3e})")]
    NotAPartialIsometry(f64),

    #[error("representation is missing index {0}")]
    MissingIndex(String),

    #[error("projection family is not monotone at ({0}, {1})")]
    NonMonotoneFamily(String, String),

    #[error("isometry {0} must vanish outside the interval")]
    NonzeroOutsideInterval(String),

    #[error("truncation too small: budget {budget} does not fit size {size}")]
    InsufficientTruncation { budget: String, size: usize },

    #[error("malformed indices: {0}")]
    MalformedIndices(String),

    #[error("invalid tolerance: {0}")]
    InvalidTolerance(String),
}

pub type Result<T> = std::result::Result<T, Error>;
