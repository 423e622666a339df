use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum TraceError {
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },
    #[error("approximate solve failed at power step {step}")]
    SolverFailed { step: usize },
}

pub type Result<T> = std::result::Result<T, TraceError>;
