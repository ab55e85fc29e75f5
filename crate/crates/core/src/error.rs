use thiserror::Error;

/// Errors raised by the permutation engine.
#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid size: {0}")]
    InvalidSize(String),

    #[error("not a permutation of 1..={n}: {reason}")]
    NotAPermutation { n: usize, reason: String },

    #[error("size mismatch: {left} vs {right}")]
    SizeMismatch { left: usize, right: usize },

    #[error("{what}: n = {n} exceeds the cap of {cap}")]
    CapExceeded {
        what: &'static str,
        n: usize,
        cap: usize,
    },

    #[error("duplicate values in window")]
    DuplicateValues,

    #[error("degenerate point configuration: {0}")]
    DegeneratePoints(String),

    #[error("index {index} out of range for size {n}")]
    IndexOutOfRange { index: usize, n: usize },

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("parse error: {0}")]
    Parse(String),

    #[error("invalid local statistic: {0}")]
    LocalStatistic(String),

    /// An exact computation produced a value that cannot occur when the
    /// algorithm is correct (negative count, inexact division).
    #[error("internal arithmetic invariant violated: {0}")]
    Arithmetic(String),

    #[error(transparent)]
    Json(#[from] serde_json::Error),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
