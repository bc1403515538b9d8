use std::io;
use std::path::PathBuf;

use thiserror::Error;

/// Harness failures, each with its own process exit code.
#[derive(Debug, Error)]
pub enum CliError {
    #[error("cannot access {path}")]
    Io {
        path: PathBuf,
        #[source]
        source: io::Error,
    },

    #[error("configuration error: {0}")]
    Config(String),

    #[error("numerical error in {context}")]
    Numerical {
        context: String,
        #[source]
        source: aign_core::Error,
    },

    #[error("validation FAILED")]
    ValidationFailed,
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Io { .. } => 1,
            CliError::Config(_) => 2,
            CliError::Numerical { .. } => 3,
            CliError::ValidationFailed => 4,
        }
    }

    /// Classifies a core error: rejected inputs are configuration errors,
    /// everything else is a numerical-regime failure.
    pub fn from_core(context: impl Into<String>, source: aign_core::Error) -> Self {
        match source {
            aign_core::Error::InvalidParameter { .. } | aign_core::Error::Precondition(_) => {
                CliError::Config(format!("{}: {source}", context.into()))
            }
            source => CliError::Numerical {
                context: context.into(),
                source,
            },
        }
    }
}

pub type Result<T> = std::result::Result<T, CliError>;

/// Attaches a context string to core results.
pub(crate) trait Context<T> {
    fn context(self, context: impl FnOnce() -> String) -> Result<T>;
}

impl<T> Context<T> for aign_core::Result<T> {
    fn context(self, context: impl FnOnce() -> String) -> Result<T> {
        self.map_err(|e| CliError::from_core(context(), e))
    }
}
