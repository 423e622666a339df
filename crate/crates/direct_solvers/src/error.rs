use sparse_core::SparseError;
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum SolverError {
    #[error("matrix is not positive definite (pivot {pivot:e} at index {index})")]
    NotPositiveDefinite { index: usize, pivot: f64 },
    #[error("not a tree: {0}")]
    NotATree(String),
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },
    #[error(
        "PCG did not certify the tolerance within {iterations} iterations (bound {certificate:e})"
    )]
    MaxIterationsExceeded { iterations: usize, certificate: f64 },
    #[error(transparent)]
    Sparse(#[from] SparseError),
}

pub type Result<T> = std::result::Result<T, SolverError>;
