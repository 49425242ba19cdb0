use std::process::ExitCode;

use incotherm_core::Error as CoreError;

/// Failure of a command, classified by exit code.
#[derive(Debug, thiserror::Error)]
pub enum CliError {
    /// Bad input: scenario, flags, or a precondition of the computation.
    #[error("{0}")]
    Validation(String),
    /// The solver or a search did not produce a certified answer.
    #[error("{0}")]
    Solver(String),
    #[error("i/o error on {path}: {source}")]
    Io {
        path: String,
        source: std::io::Error,
    },
}

impl CliError {
    pub fn validation(msg: impl Into<String>) -> Self {
        Self::Validation(msg.into())
    }

    pub fn exit_code(&self) -> u8 {
        match self {
            Self::Solver(_) => 2,
            Self::Validation(_) | Self::Io { .. } => 3,
        }
    }

    pub fn to_exit(&self) -> ExitCode {
        ExitCode::from(self.exit_code())
    }
}

impl From<CoreError> for CliError {
    fn from(e: CoreError) -> Self {
        match e {
            CoreError::Solver(_)
            | CoreError::NumericalFailure(_)
            | CoreError::Inconclusive { .. } => Self::Solver(e.to_string()),
            _ => Self::Validation(e.to_string()),
        }
    }
}

pub type CliResult<T> = Result<T, CliError>;
