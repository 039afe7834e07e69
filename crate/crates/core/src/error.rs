use thiserror::Error;

/// Crate-wide result alias.
pub type Result<T> = std::result::Result<T, CarError>;

/// Errors produced by stream construction, model training and evaluation.
#[derive(Debug, Error)]
pub enum CarError {
    /// A contract violation on an input value; names the offending field.
    #[error("invalid {field}: {message}")]
    Validation { field: &'static str, message: String },

    /// A dataset file failed to parse; carries the 1-based file line.
    #[error("dataset parse error at line {line}: {message}")]
    DatasetParse { line: u64, message: String },

    /// Prediction requested from an ensemble with no trained members.
    #[error("ensemble has no trained members")]
    Untrained,

    /// Too few non-zero paired differences for a signed-rank test.
    #[error("signed-rank test needs at least {required} non-zero paired differences, got {available}")]
    InsufficientPairs { required: usize, available: usize },

    /// A trace file does not match the expected layout.
    #[error("trace file {path}: {message}")]
    TraceFormat { path: String, message: String },

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl CarError {
    pub fn validation(field: &'static str, message: impl Into<String>) -> Self {
        CarError::Validation {
            field,
            message: message.into(),
        }
    }
}
