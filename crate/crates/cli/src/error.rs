//! Harness errors and their exit codes.

use thiserror::Error;

use crate::validate::Finding;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("configuration invalid ({} finding(s))", .0.len())]
    Validation(Vec<Finding>),

    #[error("verification failed: {0}")]
    Verification(String),

    #[error(transparent)]
    Model(#[from] afcoam::Error),

    #[error("{path}: {source}")]
    Io { path: String, source: std::io::Error },

    #[error("malformed artifact {path}: {message}")]
    Artifact { path: String, message: String },

    #[error("{0}")]
    Runtime(String),
}

impl CliError {
    pub fn io(path: impl AsRef<std::path::Path>, source: std::io::Error) -> Self {
        Self::Io { path: path.as_ref().display().to_string(), source }
    }

    pub fn artifact(path: impl AsRef<std::path::Path>, message: impl ToString) -> Self {
        Self::Artifact { path: path.as_ref().display().to_string(), message: message.to_string() }
    }

    /// 1 for rejected input, 2 for failures while running.
    pub fn exit_code(&self) -> i32 {
        match self {
            Self::Validation(_) | Self::Verification(_) => 1,
            _ => 2,
        }
    }
}

pub type CliResult<T> = std::result::Result<T, CliError>;
