use std::path::PathBuf;

use thiserror::Error;

#[derive(Debug, Error)]
pub enum CliError {
    /// A configuration field is missing, malformed or inconsistent.
    #[error("usage error in '{field}': {message}")]
    Usage { field: String, message: String },
    #[error("{path}: {source}")]
    Io { path: PathBuf, source: std::io::Error },
    #[error(transparent)]
    Numeric(#[from] bandcorr::Error),
    #[error("serialization failed: {0}")]
    Serialize(String),
    /// The acceptance suite ran and a criterion did not pass.
    #[error("criterion {id} ({name}) failed: {summary}")]
    CriterionFailed { id: u8, name: &'static str, summary: String },
}

pub(crate) fn usage(field: &str, message: impl Into<String>) -> CliError {
    CliError::Usage { field: field.to_string(), message: message.into() }
}

impl From<serde_json::Error> for CliError {
    fn from(e: serde_json::Error) -> Self {
        CliError::Serialize(e.to_string())
    }
}

impl From<csv::Error> for CliError {
    fn from(e: csv::Error) -> Self {
        CliError::Serialize(e.to_string())
    }
}
