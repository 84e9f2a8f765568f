use std::path::PathBuf;

use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("configuration error: {0}")]
    Config(String),

    #[error("invalid parameter: {0}")]
    Parameter(String),

    #[error("shape mismatch in {context}: expected {expected}, got {actual}")]
    Shape {
        context: &'static str,
        expected: String,
        actual: String,
    },

    #[error("index out of range: {0}")]
    Index(String),

    #[error("{path}:{line}: {message}")]
    Parse {
        path: String,
        line: usize,
        message: String,
    },

    #[error("split error: class {class} has {available} nodes, needs at least {required}")]
    Split {
        class: usize,
        available: usize,
        required: usize,
    },

    #[error("non-finite values in {tensor}")]
    Numeric { tensor: String },

    #[error("training diverged at epoch {epoch}: {tensor} is non-finite")]
    Diverged { epoch: usize, tensor: String },

    #[error("domain error: {0}")]
    Domain(String),

    #[error("evaluation error: {0}")]
    Evaluation(String),

    #[error("I/O error on {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("JSON error on {path}: {source}")]
    Json {
        path: PathBuf,
        #[source]
        source: serde_json::Error,
    },
}

impl Error {
    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }

    pub(crate) fn shape(context: &'static str, expected: impl ToString, actual: impl ToString) -> Self {
        Error::Shape {
            context,
            expected: expected.to_string(),
            actual: actual.to_string(),
        }
    }

    /// Process exit code used by the command-line harness.
    ///
    /// `2` configuration/parameter problems, `3` data and I/O problems,
    /// `4` numerical failures.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::Config(_) | Error::Parameter(_) | Error::Split { .. } => 2,
            Error::Parse { .. }
            | Error::Io { .. }
            | Error::Json { .. }
            | Error::Index(_)
            | Error::Shape { .. } => 3,
            Error::Numeric { .. } | Error::Diverged { .. } | Error::Domain(_) => 4,
            Error::Evaluation(_) => 1,
        }
    }
}
