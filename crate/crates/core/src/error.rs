use std::io;

use thiserror::Error;

/// Errors produced while loading, validating or mining.
#[derive(Debug, Error)]
pub enum FuimError {
    #[error("{source_name}:{line}: {message}")]
    Parse {
        source_name: String,
        line: usize,
        message: String,
    },

    #[error("validation error: {0}")]
    Validation(String),

    #[error("precondition violated: {0}")]
    Precondition(String),

    #[error("contract violation: {0}")]
    Contract(String),

    #[error("resource limit exceeded: {0}")]
    ResourceLimit(String),

    #[error("miners disagree: {0}")]
    Disagreement(String),

    #[error("{context}: {source}")]
    Io {
        context: String,
        #[source]
        source: io::Error,
    },
}

impl FuimError {
    pub(crate) fn parse(source_name: &str, line: usize, message: impl Into<String>) -> Self {
        FuimError::Parse {
            source_name: source_name.to_string(),
            line,
            message: message.into(),
        }
    }

    pub(crate) fn io(context: impl Into<String>, source: io::Error) -> Self {
        FuimError::Io {
            context: context.into(),
            source,
        }
    }
}

pub type Result<T, E = FuimError> = std::result::Result<T, E>;
