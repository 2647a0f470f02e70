use std::path::PathBuf;
use thiserror::Error;

/// Harness-level failures, each mapped to a process exit code:
/// 0 success, 1 verification failure, 2 configuration error, 3 solver failure.
#[derive(Debug, Error)]
pub enum HarnessError {
    #[error("configuration error: {0}")]
    Config(String),

    #[error("cannot read config {path}: {reason}")]
    ConfigIo { path: PathBuf, reason: String },

    #[error("verification failed: {0}")]
    Verification(String),

    #[error("solver failure in cell {cell}: {source}")]
    Solver {
        cell: String,
        #[source]
        source: subdiff::Error,
    },

    #[error("cannot write output {path}: {reason}")]
    OutputIo { path: PathBuf, reason: String },
}

impl HarnessError {
    pub fn exit_code(&self) -> i32 {
        match self {
            HarnessError::Verification(_) => 1,
            HarnessError::Config(_) | HarnessError::ConfigIo { .. } => 2,
            HarnessError::Solver { .. } => 3,
            HarnessError::OutputIo { .. } => 2,
        }
    }
}

pub type Result<T> = std::result::Result<T, HarnessError>;
