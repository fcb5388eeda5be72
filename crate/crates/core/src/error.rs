use thiserror::Error;

/// Errors surfaced by the optimizer library.
#[derive(Debug, Error)]
pub enum Error {
    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("{0} must not be empty")]
    Empty(&'static str),

    #[error("invalid design: {0}")]
    InvalidDesign(String),

    #[error("invalid objective vector: {0}")]
    InvalidObjectives(String),

    #[error("archive accepts only simulated solutions")]
    NotSimulated,

    #[error("training data error: {0}")]
    Data(String),

    #[error("numerical failure: {0}")]
    Numerical(String),

    #[error("invalid configuration: `{key}` {message}")]
    Config { key: String, message: String },

    #[error("evaluation failed: {0}")]
    Evaluation(String),

    #[error("evaluator aborted: {0}")]
    EvaluatorAborted(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

impl Error {
    pub fn config(key: impl Into<String>, message: impl Into<String>) -> Self {
        Error::Config {
            key: key.into(),
            message: message.into(),
        }
    }
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
