//! CLI-side error type: every variant maps to process exit code 1 (bad
//! configuration or an I/O failure while reading/writing artifacts).  Solver
//! outcomes such as a suspected blow-up are statuses, not errors, and carry
//! their own exit codes.

use thiserror::Error;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),
    #[error("config parse error: {0}")]
    Json(#[from] serde_json::Error),
    #[error("invalid config: {0}")]
    Invalid(String),
    #[error("invalid config: {0}")]
    Core(#[from] rds_core::Error),
}

impl CliError {
    pub fn invalid(msg: impl Into<String>) -> CliError {
        CliError::Invalid(msg.into())
    }
}
