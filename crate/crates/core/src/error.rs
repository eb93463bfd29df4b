use std::path::PathBuf;

use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("i/o error on {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("{context}: malformed CSV at row {row}: {message}")]
    Csv {
        context: String,
        row: usize,
        message: String,
    },

    #[error("{context}: column `{column}` mixes integers and strings (row {row})")]
    MixedType {
        context: String,
        column: String,
        row: usize,
    },

    #[error("invalid query: {0}")]
    InvalidQuery(String),

    #[error("cyclic: supply a GHD ({0})")]
    Cyclic(String),

    #[error("invalid root `{0}`")]
    InvalidRoot(String),

    #[error("invalid GHD: {0}")]
    InvalidGhd(String),

    #[error("filter `{0}` fits no bag of the decomposition")]
    FilterPlacement(String),

    #[error("star engine requires Q*_m shape: {0}")]
    NotStar(String),

    #[error("union branches disagree: {0}")]
    UnionMismatch(String),

    #[error("oracle refused: intermediate join exceeds {limit} rows")]
    OracleGuard { limit: usize },

    #[error("invalid parameters: {0}")]
    InvalidParams(String),
}

impl Error {
    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }
}
