use thiserror::Error;

/// Errors raised by the model, objective, engines and report layers.
#[derive(Debug, Error)]
pub enum FloodError {
    #[error("invalid grid dimension: {0}")]
    InvalidDimension(String),

    #[error("gene value {0} out of range (expected 0..=3)")]
    GeneOutOfRange(u8),

    #[error("malformed encoding: {0}")]
    MalformedEncoding(String),

    #[error("invalid site factor {0} (must be finite and > 0)")]
    InvalidSiteFactor(f64),

    #[error("invalid parameter `{name}`: {reason}")]
    InvalidParameter { name: String, reason: String },

    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),

    #[error("empty population")]
    EmptyPopulation,

    #[error("config error at `{path}`: {message}")]
    Config { path: String, message: String },

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

impl FloodError {
    pub(crate) fn param(name: impl Into<String>, reason: impl Into<String>) -> Self {
        FloodError::InvalidParameter {
            name: name.into(),
            reason: reason.into(),
        }
    }

    pub(crate) fn config(path: impl Into<String>, message: impl Into<String>) -> Self {
        FloodError::Config {
            path: path.into(),
            message: message.into(),
        }
    }
}

pub type Result<T> = std::result::Result<T, FloodError>;
