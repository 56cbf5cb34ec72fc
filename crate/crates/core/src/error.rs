use std::path::PathBuf;

use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("cannot read {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("malformed descriptor record at byte offset {offset}: {reason}")]
    MalformedRecord { offset: usize, reason: String },

    #[error("line {line}: {reason}")]
    MalformedLine { line: usize, reason: String },

    #[error("invalid tree number {0:?}")]
    InvalidTreeNumber(String),

    #[error("duplicate descriptors in vocabulary: {}", .0.join(", "))]
    DuplicateDescriptors(Vec<String>),

    #[error("descriptor id {0:?} does not resolve in the vocabulary")]
    UnresolvedDescriptor(String),

    #[error("insufficient data: {0}")]
    InsufficientData(String),

    #[error("invalid argument: {0}")]
    InvalidArgument(String),
}

impl Error {
    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }
}
