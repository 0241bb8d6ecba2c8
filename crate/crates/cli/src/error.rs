use std::path::Path;

use thiserror::Error;

/// Failures that end a command with exit code 2.
#[derive(Debug, Error)]
pub enum CliError {
    #[error("{path}: {msg}")]
    Input { path: String, msg: String },
    #[error("{0}")]
    Invalid(String),
    #[error(transparent)]
    Library(#[from] conemetric::Error),
    #[error("{0}")]
    Io(#[from] std::io::Error),
}

impl CliError {
    pub fn input(path: &Path, msg: impl Into<String>) -> Self {
        CliError::Input {
            path: path.display().to_string(),
            msg: msg.into(),
        }
    }
}
