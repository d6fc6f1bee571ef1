use thiserror::Error;

/// Every failure the library can report.
#[derive(Debug, Error)]
pub enum Error {
    #[error("insufficient data: {0}")]
    InsufficientData(String),

    #[error("non-finite value in {0}")]
    NonFinite(String),

    #[error("coordinate {index} = {value} lies outside the support [{lo}, {hi}]")]
    OutOfSupport { index: usize, value: f64, lo: f64, hi: f64 },

    #[error("truncation interval [{lo}, {hi}] carries no normal mass")]
    DegenerateMass { lo: f64, hi: f64 },

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("quadrature did not reach tolerance {tol:e} (estimated error {estimate:e})")]
    QuadratureNonConvergence { tol: f64, estimate: f64 },

    #[error("weight map {index} varies by {spread} > 1 on the support")]
    BoundednessViolation { index: usize, spread: f64 },

    #[error("normal system is rank deficient (pivot {pivot} at column {column})")]
    RankDeficient { column: usize, pivot: f64 },

    #[error("normalizer c_{index}^f vanishes")]
    ZeroNormalizer { index: usize },

    #[error("rectangle crosses a bin boundary on coordinate {index}")]
    ContainmentViolation { index: usize },

    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("configuration error: {0}")]
    Config(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
