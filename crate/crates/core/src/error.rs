use std::path::PathBuf;

use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("io error on {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("{path}:{line}: {msg}")]
    Parse {
        path: PathBuf,
        line: usize,
        msg: String,
    },

    #[error("unknown identifier {0:?}")]
    UnknownId(String),

    #[error("shape mismatch: {0}")]
    Shape(String),

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("insufficient unknown pairs: requested {requested}, available {available}")]
    InsufficientUnknown { requested: usize, available: usize },

    #[error("metric undefined: {0}")]
    SingleClass(String),

    #[error("divergence: {0}")]
    Divergence(String),

    #[error("svd failed: {0}")]
    Svd(String),

    #[error("fold {index}: {source}")]
    Fold {
        index: usize,
        #[source]
        source: Box<Error>,
    },
}

impl Error {
    pub(crate) fn parse(path: &std::path::Path, line: usize, msg: impl Into<String>) -> Self {
        Error::Parse {
            path: path.to_path_buf(),
            line,
            msg: msg.into(),
        }
    }

    pub(crate) fn io(path: &std::path::Path, source: std::io::Error) -> Self {
        Error::Io {
            path: path.to_path_buf(),
            source,
        }
    }

    /// True for failures of the numerics (divergence, SVD breakdown) as
    /// opposed to bad inputs or configuration.
    pub fn is_numerical(&self) -> bool {
        match self {
            Error::Divergence(_) | Error::Svd(_) => true,
            Error::Fold { source, .. } => source.is_numerical(),
            _ => false,
        }
    }
}
