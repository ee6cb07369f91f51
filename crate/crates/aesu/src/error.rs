use std::path::PathBuf;

use thiserror::Error;

pub type Result<T, E = IngestError> = std::result::Result<T, E>;

/// Why a single input line could not be turned into a record.
#[derive(Debug, Error)]
pub enum LineError {
    #[error("expected {expected} fields, found {found}")]
    FieldCount { expected: usize, found: usize },
    #[error("field {index} is not a non-negative integer: {value:?}")]
    NotInteger { index: usize, value: String },
    #[error("bad counts: {0}")]
    Counts(#[from] aesu_core::Error),
    #[error("invalid record: {0}")]
    Invalid(String),
}

#[derive(Debug, Error)]
pub enum IngestError {
    #[error("{}: {source}", path.display())]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("{}:{line}: malformed line: {source}", path.display())]
    MalformedLine {
        path: PathBuf,
        line: usize,
        #[source]
        source: LineError,
    },
    #[error("csv: {0}")]
    Csv(#[from] csv::Error),
    #[error("json: {0}")]
    Json(#[from] serde_json::Error),
    #[error("{0}")]
    Usage(String),
    #[error("{0}")]
    Input(String),
    #[error("no images recommended by the {0} rule")]
    NoRecommendations(&'static str),
    #[error(transparent)]
    Core(#[from] aesu_core::Error),
    #[error("internal error: {0}")]
    Internal(String),
}

impl IngestError {
    /// 1 for problems with the inputs, 2 for failures of the tool itself.
    pub fn exit_code(&self) -> i32 {
        match self {
            IngestError::Internal(_) => 2,
            _ => 1,
        }
    }

    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        IngestError::Io { path: path.into(), source }
    }
}
