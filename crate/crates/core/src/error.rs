use std::path::PathBuf;

use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("numeric mode mismatch: {0} vs {1}")]
    ModeMismatch(&'static str, &'static str),

    #[error("radicand mismatch: sqrt({0}) vs sqrt({1}) cannot be combined exactly")]
    RadicandMismatch(u64, u64),

    #[error("non-finite coefficient at index {0}")]
    NonFinite(usize),

    #[error("zero denominator at index {0}")]
    ZeroDenominator(usize),

    #[error("{op} requires a series of order >= {min}, got {got}")]
    OrderTooSmall { op: &'static str, min: usize, got: usize },

    #[error("evaluation point |z| = {0} is outside the open unit disk")]
    OutsideDisk(f64),

    #[error("{0} is beyond the factor table limit {1}")]
    BeyondTable(u64, u64),

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("zero series has no leading index")]
    ZeroSeries,

    #[error("non-finite entry in Gram system at ({0}, {1})")]
    NonFiniteGram(usize, usize),

    #[error("cache I/O error at {path}: {source}")]
    Cache {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
}

pub type Result<T> = std::result::Result<T, Error>;
