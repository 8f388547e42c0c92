use rotframe_core::Error as CoreError;
use thiserror::Error;

/// Failure classes, each with its own process exit code.
#[derive(Debug, Clone, Error)]
pub enum CliError {
    #[error("config error: {0}")]
    Config(String),
    #[error("precondition failed: {0}")]
    Precondition(String),
    #[error("numerical stability abort: {0}")]
    Numerical(String),
}

impl CliError {
    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Config(_) => 2,
            CliError::Precondition(_) => 3,
            CliError::Numerical(_) => 4,
        }
    }

    pub fn config(field: &str, reason: impl std::fmt::Display) -> Self {
        CliError::Config(format!("`{field}`: {reason}"))
    }
}

impl From<CoreError> for CliError {
    fn from(e: CoreError) -> Self {
        match e {
            CoreError::InvalidParameter { .. }
            | CoreError::TooFewVertices(_)
            | CoreError::OpenPath { .. }
            | CoreError::DuplicateClosingVertex
            | CoreError::Io(_)
            | CoreError::Format(_) => CliError::Config(e.to_string()),
            CoreError::NumericalInstability(_) | CoreError::EigenSolve => CliError::Numerical(e.to_string()),
            _ => CliError::Precondition(e.to_string()),
        }
    }
}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        CliError::Config(format!("io: {e}"))
    }
}

pub type CliResult<T> = std::result::Result<T, CliError>;
