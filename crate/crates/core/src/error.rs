use std::path::PathBuf;

use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("index {index:?} out of range for grid of size {size}")]
    Range { index: Vec<usize>, size: usize },

    #[error("shape mismatch: {0}")]
    Shape(String),

    #[error("non-finite multiplier value at bin {bin:?} (omega = {omega:?})")]
    NonFinite { bin: Vec<usize>, omega: Vec<f64> },

    #[error("invalid argument: {0}")]
    Argument(String),

    #[error("invalid configuration: {0}")]
    Config(String),

    #[error("insufficient data: {0}")]
    InsufficientData(String),

    #[error("malformed header {path}: {reason}")]
    MalformedHeader { path: PathBuf, reason: String },

    #[error("truncated payload {path}: expected {expected} bytes, found {found}")]
    Truncated {
        path: PathBuf,
        expected: usize,
        found: usize,
    },

    #[error("payload {path} has {found} bytes, header describes {expected}")]
    PayloadSize {
        path: PathBuf,
        expected: usize,
        found: usize,
    },

    #[error("dtype/domain mismatch in {path}: {reason}")]
    DtypeMismatch { path: PathBuf, reason: String },

    #[error("i/o error on {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
}

impl Error {
    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }

    /// True for errors raised while touching the filesystem or decoding a file.
    pub fn is_io(&self) -> bool {
        matches!(
            self,
            Error::Io { .. }
                | Error::MalformedHeader { .. }
                | Error::Truncated { .. }
                | Error::PayloadSize { .. }
                | Error::DtypeMismatch { .. }
        )
    }
}
