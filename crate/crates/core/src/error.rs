use thiserror::Error;

#[derive(Debug, Error)]
pub enum ScsError {
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("length mismatch: {left} vs {right}")]
    LengthMismatch { left: usize, right: usize },

    #[error("expected a {expected} domain sequence")]
    WrongDomain { expected: &'static str },

    #[error("malformed CFR input: {0}")]
    MalformedCfr(String),

    #[error("precondition violated: {0}")]
    Precondition(String),

    #[error("sequence {index} is not unimodular: |u_{position}| = {magnitude}")]
    NotUnimodular {
        index: usize,
        position: usize,
        magnitude: f64,
    },

    #[error("matrix is not orthogonal with unimodular entries (deviation {deviation:e})")]
    NotOrthogonal { deviation: f64 },

    #[error("empty family")]
    EmptyFamily,

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, ScsError>;

pub(crate) fn invalid<T>(msg: impl Into<String>) -> Result<T> {
    Err(ScsError::InvalidParameter(msg.into()))
}
