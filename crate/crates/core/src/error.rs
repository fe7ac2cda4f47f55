use thiserror::Error;

/// Errors raised when inputs violate the contracts of an operation.
#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid measure: {0}")]
    InvalidMeasure(String),
    #[error("grid of {m} nodes cannot represent degree {n_max} (need m >= {required})")]
    GridTooSmall { m: usize, n_max: usize, required: usize },
    #[error("point {0} lies outside the open unit disk")]
    OutsideDisk(String),
    #[error("expected an analytic input but coefficient at n = {0} is nonzero")]
    NotAnalytic(i64),
    #[error("input must be nonzero")]
    ZeroInput,
    #[error("invalid multiplier pair: {0}")]
    InvalidPair(String),
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
    #[error("inadmissible decomposition: {0}")]
    Inadmissible(String),
    #[error("malformed JSON: {0}")]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
