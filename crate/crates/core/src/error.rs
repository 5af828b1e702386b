use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("dimension mismatch: {0}")]
    Dimension(String),

    #[error("non-finite entry at ({row}, {col})")]
    NonFinite { row: usize, col: usize },

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("not a spherical tight frame: {0}")]
    NotTightFrame(String),

    #[error("not a Gram point: {0}")]
    NotGramPoint(String),

    #[error("step too large at sample {index} (t = {t}): {reason}")]
    StepTooLarge { index: usize, t: f64, reason: String },

    #[error("path construction failed: {0}")]
    PathFailed(String),

    #[error("unsupported: {0}")]
    Unsupported(String),

    #[error("inconsistent identification data: {0}")]
    Transcription(String),

    #[error("json: {0}")]
    Json(#[from] serde_json::Error),
}

impl Error {
    /// True for malformed or out-of-contract input, as opposed to a failed
    /// mathematical check on well-formed input.
    pub fn is_input_error(&self) -> bool {
        matches!(
            self,
            Error::Dimension(_)
                | Error::NonFinite { .. }
                | Error::InvalidArgument(_)
                | Error::Unsupported(_)
                | Error::Json(_)
        )
    }
}
