use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid kernel spec: {0}")]
    InvalidSpec(String),

    #[error("dimension mismatch: expected {expected}, got {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("Hermite index must be non-negative, got {0}")]
    NegativeIndex(i64),

    #[error("rejection sampling stalled at step {step} after {proposals} proposals")]
    RejectionStalled { step: usize, proposals: u64 },

    #[error("Gram matrix is singular even after diagonal jitter")]
    SingularGram,

    #[error("squared error {0:e} is below the clamp threshold")]
    NegativeError(f64),

    #[error("integrand is not supported by this rule")]
    UnsupportedIntegrand,

    #[error("length mismatch: expected {expected}, got {found}")]
    LengthMismatch { expected: usize, found: usize },

    #[error("{n} is not a perfect {d}-th power")]
    NotAPower { n: usize, d: usize },

    #[error("insufficient data: {0}")]
    InsufficientData(String),

    #[error("eigenfunction matrix is numerically singular at these nodes")]
    DegenerateNodes,

    #[error("matrix is rank deficient")]
    RankDeficient,

    #[error("unsupported: {0}")]
    Unsupported(String),

    #[error("invalid config: {0}")]
    InvalidConfig(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
