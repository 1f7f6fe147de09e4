//! Library half of the `ctinv` binary: file formats and the four command
//! pipelines, kept callable so the integration suite can drive them
//! directly.

pub mod commands;
pub mod files;

use thiserror::Error;

#[derive(Debug, Error)]
pub enum CliError {
    /// Malformed files, bad flags, parity mismatches: exit code 2.
    #[error("usage error: {0}")]
    Usage(String),
    /// Solver did not converge (a best-iterate report is still written):
    /// exit code 3.
    #[error("solver failure: {0}")]
    Solver(String),
    /// Filesystem trouble: exit code 1.
    #[error("io error: {0}")]
    Io(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Io(_) => 1,
            CliError::Usage(_) => 2,
            CliError::Solver(_) => 3,
        }
    }
}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        CliError::Io(e.to_string())
    }
}

impl From<coxthompson::CtError> for CliError {
    fn from(e: coxthompson::CtError) -> Self {
        CliError::Usage(e.to_string())
    }
}
