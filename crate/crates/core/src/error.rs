use std::path::PathBuf;

/// Errors produced by the verification pipeline.
#[derive(Debug, thiserror::Error)]
pub enum Error {
    /// A caller violated an operation precondition (programming error, not bad data).
    #[error("contract violation: {0}")]
    Contract(String),

    /// Input data was rejected by validation.
    #[error("invalid input: {0}")]
    InvalidInput(String),

    /// A configuration file or value was unusable.
    #[error("configuration error: {0}")]
    Config(String),

    #[error("i/o error on {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("csv error on {path}: {source}")]
    Csv {
        path: PathBuf,
        #[source]
        source: csv::Error,
    },

    #[error("json error: {0}")]
    Json(#[from] serde_json::Error),

    /// Two corpus records share an id.
    #[error("duplicate record id {id}: first seen in {first}, again in {second}")]
    DuplicateRecordId {
        id: String,
        first: String,
        second: String,
    },

    /// Extraction of a structured or wrapper document failed outright.
    #[error("extraction failed for {record_id}: {reason}")]
    Extraction { record_id: String, reason: String },

    /// Numeric training diverged (NaN/inf loss).
    #[error("training diverged: {0}")]
    Diverged(String),
}

impl Error {
    pub fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }

    pub fn csv(path: impl Into<PathBuf>, source: csv::Error) -> Self {
        Error::Csv {
            path: path.into(),
            source,
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
