use thiserror::Error;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("unknown configuration key `{0}`")]
    UnknownKey(String),

    #[error("configuration key `{key}`: expected {expected}, got `{value}`")]
    TypeMismatch {
        key: String,
        value: String,
        expected: &'static str,
    },

    #[error("configuration key `{key}`: {reason}")]
    Constraint { key: String, reason: String },

    #[error("configuration line {line} is not `key = value`: {text}")]
    Syntax { line: usize, text: String },

    #[error("environment variable `ANISOMHD_THREADS`: {0}")]
    Threads(String),

    #[error(transparent)]
    Core(#[from] anisomhd::Error),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

impl CliError {
    /// The configuration key an error refers to, if any.
    pub fn key(&self) -> Option<&str> {
        match self {
            CliError::UnknownKey(k) => Some(k),
            CliError::TypeMismatch { key, .. } | CliError::Constraint { key, .. } => Some(key),
            _ => None,
        }
    }
}

pub type Result<T> = std::result::Result<T, CliError>;
