use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    /// Invalid parameter or precondition, naming the offending field.
    #[error("configuration error in `{field}`: {message}")]
    Config { field: String, message: String },

    #[error("dimension mismatch: expected {expected}, got {actual}")]
    DimensionMismatch { expected: usize, actual: usize },

    /// A numerical refinement failed to settle; the trace is kept for reports.
    #[error("inconclusive: {message}")]
    Inconclusive {
        message: String,
        trace: Vec<(f64, f64)>,
    },

    #[error("point {re}{im:+}i lies outside the admissible domain: {message}")]
    OutOfDomain { re: f64, im: f64, message: String },

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

impl Error {
    pub fn config(field: impl Into<String>, message: impl Into<String>) -> Self {
        Error::Config {
            field: field.into(),
            message: message.into(),
        }
    }

    pub fn inconclusive(message: impl Into<String>, trace: Vec<(f64, f64)>) -> Self {
        Error::Inconclusive {
            message: message.into(),
            trace,
        }
    }
}
