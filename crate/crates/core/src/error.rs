use std::path::PathBuf;

use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("cannot read {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("malformed CSV: {0}")]
    Csv(#[from] csv::Error),

    #[error("label column {0} not found")]
    MissingLabelColumn(String),

    #[error("row {row}: {reason}")]
    BadRow { row: usize, reason: String },

    #[error("dataset is empty")]
    EmptyDataset,

    #[error("invalid parameter `{name}`: {reason}")]
    InvalidParameter { name: &'static str, reason: String },

    #[error("missing required parameter `{0}`")]
    MissingParameter(&'static str),

    #[error("expected {expected} features, got {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("operation needs a {expected} task")]
    TaskMismatch { expected: &'static str },

    #[error("probability vector is malformed: {0}")]
    BadProbabilities(String),

    #[error("model file line {line}: {reason}")]
    ModelFormat { line: usize, reason: String },

    #[error("empty index set")]
    EmptyIndexSet,
}

impl Error {
    pub(crate) fn param(name: &'static str, reason: impl Into<String>) -> Self {
        Error::InvalidParameter {
            name,
            reason: reason.into(),
        }
    }

    /// True for errors caused by invalid configuration rather than bad data.
    pub fn is_config(&self) -> bool {
        matches!(
            self,
            Error::InvalidParameter { .. } | Error::MissingParameter(_) | Error::TaskMismatch { .. }
        )
    }
}
