use std::path::PathBuf;

use thiserror::Error;

/// Unified error type for the pipeline crates.
#[derive(Debug, Error)]
pub enum Error {
    #[error("file not found: {0}")]
    FileNotFound(PathBuf),
    #[error("unsupported image format: {0}")]
    UnsupportedFormat(PathBuf),
    #[error("corrupt image: {path}: {reason}")]
    CorruptImage { path: PathBuf, reason: String },
    #[error("i/o failure: {path}: {source}")]
    IoFailure {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("pad record does not match raster: {0}")]
    RecordMismatch(String),
    #[error("dimension mismatch: {0}x{1} vs {2}x{3}")]
    DimensionMismatch(usize, usize, usize, usize),
    #[error("fusion weight {0} outside [0,1]")]
    WeightOutOfRange(f64),
    #[error("input length {0} is not a power of two")]
    NonPowerOfTwoLength(usize),
    #[error("raster is {0}x{1}, not square")]
    NotSquare(usize, usize),
    #[error("side {0} is not a power of two")]
    NotPowerOfTwo(usize),
    #[error("{requested} decomposition levels exceed maximum {max} for side {side}")]
    TooManyLevels {
        requested: usize,
        max: usize,
        side: usize,
    },
    #[error("pyramid shape mismatch: {0}")]
    ShapeMismatch(String),
    #[error("{n} points is too few for {clusters} clusters")]
    TooFewPoints { n: usize, clusters: usize },
    #[error("non-finite value in input data")]
    NonFiniteInput,
    #[error("empty input")]
    EmptyInput,
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
}

pub type Result<T> = std::result::Result<T, Error>;
