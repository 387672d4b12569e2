use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("precondition violated: {0}")]
    Precondition(String),

    #[error("invariant violated: {0}")]
    Invariant(String),

    #[error("empty region: {0}")]
    EmptyRegion(String),

    #[error("non-finite {what} at sample {sample}")]
    NonFinite { what: String, sample: usize },

    #[error("unsupported: {0}")]
    Unsupported(String),

    #[error("schema violation: {0}")]
    Schema(String),

    #[error("eigensolver failure: {0}")]
    Eigen(String),

    #[error("integration failure: {0}")]
    Integration(String),

    #[error(transparent)]
    Json(#[from] serde_json::Error),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl Error {
    /// True for errors caused by bad input rather than by a failed computation.
    pub fn is_usage(&self) -> bool {
        matches!(
            self,
            Error::InvalidParameter(_)
                | Error::Precondition(_)
                | Error::Schema(_)
                | Error::Unsupported(_)
                | Error::Json(_)
        )
    }
}

pub type Result<T> = std::result::Result<T, Error>;
