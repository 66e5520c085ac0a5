use std::path::PathBuf;

use thiserror::Error;
use wsn_core::SimError;

#[derive(Debug, Error)]
pub enum ExperimentError {
    #[error("malformed config: {0}")]
    Parse(#[from] serde_json::Error),
    #[error(transparent)]
    Sim(#[from] SimError),
    #[error("invalid value for `{field}`: {value} (expected {bound})")]
    OutOfRange {
        field: &'static str,
        value: String,
        bound: &'static str,
    },
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
}

impl ExperimentError {
    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        ExperimentError::Io {
            path: path.into(),
            source,
        }
    }
}

pub type Result<T> = std::result::Result<T, ExperimentError>;
