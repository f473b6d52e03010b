use std::process::ExitCode;

use thiserror::Error;

/// Failure of a command, mapped onto the process exit status.
#[derive(Debug, Error)]
pub enum CliError {
    /// Exit 1.
    #[error("{0}")]
    Expectation(String),
    /// Exit 2.
    #[error("{0}")]
    Usage(String),
    /// Exit 3. Carries the offending image when there is one.
    #[error("{}{message}", image_id.as_ref().map(|id| format!("image {id}: ")).unwrap_or_default())]
    Data { image_id: Option<String>, message: String },
    /// Exit 4.
    #[error("internal error: {0}")]
    Internal(String),
}

impl CliError {
    pub fn data(message: impl ToString) -> Self {
        CliError::Data {
            image_id: None,
            message: message.to_string(),
        }
    }

    pub fn image(image_id: &str, message: impl ToString) -> Self {
        CliError::Data {
            image_id: Some(image_id.to_string()),
            message: message.to_string(),
        }
    }

    pub fn exit_code(&self) -> ExitCode {
        ExitCode::from(match self {
            CliError::Expectation(_) => 1,
            CliError::Usage(_) => 2,
            CliError::Data { .. } => 3,
            CliError::Internal(_) => 4,
        })
    }
}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        CliError::Internal(e.to_string())
    }
}
