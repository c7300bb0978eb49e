use std::path::PathBuf;

use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid dimension: {0}")]
    InvalidDimension(String),

    #[error("dimension mismatch: expected {expected}, got {actual}")]
    DimensionMismatch { expected: usize, actual: usize },

    #[error("index out of range: {what} = {index}, limit {limit}")]
    IndexOutOfRange {
        what: &'static str,
        index: usize,
        limit: usize,
    },

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("not a valid density matrix: {0}")]
    InvalidDensityMatrix(String),

    #[error("{component} refers to unknown path {path}")]
    UnknownPath { component: String, path: usize },

    #[error("time bin went negative ({time}) on path {path}")]
    NegativeTime { path: usize, time: i64 },

    #[error("time bin {time} exceeds the tracked window (limit {limit})")]
    TimeOverflow { time: usize, limit: usize },

    #[error("dispersion does not map frequency bin {bin} onto an integer time bin: {delay_ns:.3} ns vs bin spacing {bin_spacing_ns} ns")]
    DispersionMismatch {
        bin: usize,
        delay_ns: f64,
        bin_spacing_ns: f64,
    },

    #[error("input {input} lost all light on the post-selected path")]
    AllLightLost { input: usize },

    #[error("missing count row for input {0}")]
    MissingInput(usize),

    #[error("parse error: {0}")]
    Parse(String),

    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error(transparent)]
    Csv(#[from] csv::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),

    #[error(transparent)]
    TomlDe(#[from] toml::de::Error),

    #[error(transparent)]
    TomlSer(#[from] toml::ser::Error),
}

impl Error {
    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }
}
