use thiserror::Error;

#[derive(Debug, Error)]
pub enum HkError {
    #[error("malformed rational literal {literal:?}: {reason}")]
    BadRational { literal: String, reason: &'static str },
    #[error("agent index {index} out of range for {n} agents")]
    IndexOutOfRange { index: usize, n: usize },
    #[error("profile must contain at least one agent")]
    EmptyProfile,
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
    #[error("size mismatch: expected {expected}, got {got}")]
    SizeMismatch { expected: usize, got: usize },
    #[error("refusing to enumerate I_n^c for n = {n}: above limit {limit}")]
    EnumerationLimit { n: usize, limit: usize },
    #[error("step cap {cap} reached before {what}")]
    CapReached { cap: usize, what: &'static str },
    #[error("malformed input: {0}")]
    Format(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub type Result<T, E = HkError> = std::result::Result<T, E>;
