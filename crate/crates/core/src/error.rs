use thiserror::Error;

/// Errors raised anywhere in the crate.
#[derive(Debug, Error)]
pub enum GpbaError {
    #[error("invalid interval: lo = {lo} must be strictly below hi = {hi}")]
    InvalidInterval { lo: f64, hi: f64 },

    #[error("invalid probability {0}: expected a value in (0, 1)")]
    InvalidProbability(f64),

    #[error("invalid split point {x}: must lie strictly inside ({lo}, {hi})")]
    InvalidSplit { x: f64, lo: f64, hi: f64 },

    #[error("degenerate update: {0}")]
    DegenerateUpdate(&'static str),

    #[error("invalid oracle accuracy {0}: expected a value in [1/2, 1]")]
    InvalidAccuracy(f64),

    #[error("invalid minority count j = {j} for batch size k = {k}")]
    InvalidCount { j: u32, k: u32 },

    #[error("unsupported batch size k = {k}: need k >= {min}")]
    UnsupportedBatch { k: u32, min: u32 },

    #[error("location {x} outside oracle domain [{lo}, {hi}]")]
    Domain { x: f64, lo: f64, hi: f64 },

    #[error("empty candidate list")]
    EmptyCandidates,

    #[error("configuration error: {0}")]
    Config(String),

    #[error("parse error: {0}")]
    Parse(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub type Result<T, E = GpbaError> = std::result::Result<T, E>;
