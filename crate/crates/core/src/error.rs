use std::path::PathBuf;

use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("configuration error in `{key}`: {message}")]
    Config { key: String, message: String },

    #[error("shape mismatch: expected {expected} values, got {got}")]
    Shape { expected: usize, got: usize },

    #[error("degenerate metric at node {node}: {message}")]
    DegenerateMetric { node: usize, message: String },

    #[error("blow-up detected at node {node}, t = {t:e}: {reason}")]
    BlowUp { node: usize, t: f64, reason: String },

    #[error("dimension n = {0} is not supported here (requires n = 2)")]
    UnsupportedDimension(usize),

    #[error("contract violation: {0}")]
    Contract(String),

    #[error("insufficient data: {0}")]
    InsufficientData(String),

    #[error("{path}: row {row}: {message}")]
    Ingestion { path: PathBuf, row: usize, message: String },

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

impl Error {
    pub(crate) fn config(key: impl Into<String>, message: impl Into<String>) -> Self {
        Error::Config {
            key: key.into(),
            message: message.into(),
        }
    }

    pub fn is_config(&self) -> bool {
        matches!(
            self,
            Error::Config { .. } | Error::Ingestion { .. } | Error::UnsupportedDimension(_)
        )
    }

    pub fn is_blow_up(&self) -> bool {
        matches!(self, Error::BlowUp { .. })
    }
}
