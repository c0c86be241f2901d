use std::path::PathBuf;

use thiserror::Error;

/// Errors surfaced by the library.
#[derive(Debug, Error)]
pub enum Error {
    #[error("dimension mismatch in {context}: expected {expected}, got {actual}")]
    Dimension {
        context: &'static str,
        expected: usize,
        actual: usize,
    },

    #[error("unknown problem '{0}'")]
    UnknownProblem(String),

    #[error("invalid configuration: {0}")]
    InvalidConfig(String),

    #[error("invalid input to {context}: {message}")]
    InvalidInput {
        context: &'static str,
        message: String,
    },

    #[error("non-finite value encountered in {0}")]
    NonFinite(&'static str),

    /// An evaluation returned NaN or infinity mid-run.
    #[error("evaluation fault at iteration {iteration}: non-finite {what}")]
    EvaluationFault { iteration: usize, what: &'static str },

    /// The penalty parameter exceeded its safety cap.
    #[error("penalty parameter overflow at iteration {iteration}: nu = {nu:e}")]
    PenaltyOverflow { iteration: usize, nu: f64 },

    #[error("I/O error on {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("malformed trace file {path}: {message}")]
    MalformedTrace { path: PathBuf, message: String },
}

impl Error {
    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
