use std::path::PathBuf;

use thiserror::Error;

#[derive(Debug, Error)]
pub enum HarnessError {
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("{path}:{line}:{column}: {message}")]
    Parse {
        path: PathBuf,
        line: usize,
        column: usize,
        message: String,
    },
    #[error("invalid `{field}`: {message}")]
    Validation { field: String, message: String },
    #[error("unknown game `{0}`; known games: {known}", known = crate::registry::NAMES.join(", "))]
    UnknownGame(String),
    #[error("{0}")]
    Unsupported(String),
    #[error("{context}: {source}")]
    Context {
        context: String,
        #[source]
        source: Box<HarnessError>,
    },
    #[error("csv: {0}")]
    Csv(#[from] csv::Error),
    #[error(transparent)]
    Core(#[from] gaspp_core::Error),
}

impl HarnessError {
    pub fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        HarnessError::Io {
            path: path.into(),
            source,
        }
    }

    pub fn validation(field: impl Into<String>, message: impl Into<String>) -> Self {
        HarnessError::Validation {
            field: field.into(),
            message: message.into(),
        }
    }

    pub fn context(self, context: impl Into<String>) -> Self {
        HarnessError::Context {
            context: context.into(),
            source: Box::new(self),
        }
    }

    /// True for bad input rather than a failure while running.
    pub fn is_usage(&self) -> bool {
        match self {
            HarnessError::Parse { .. } | HarnessError::Validation { .. } | HarnessError::UnknownGame(_) => true,
            HarnessError::Context { source, .. } => source.is_usage(),
            _ => false,
        }
    }
}

pub type Result<T, E = HarnessError> = std::result::Result<T, E>;
