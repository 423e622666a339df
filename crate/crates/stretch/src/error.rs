use direct_solvers::SolverError;
use sparse_core::SparseError;
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum StretchError {
    #[error("not a spanning tree: {0}")]
    NotATree(String),
    #[error("vertex sets differ: {expected} vs {got} vertices")]
    VertexMismatch { expected: usize, got: usize },
    #[error("graph is disconnected ({components} components)")]
    Disconnected { components: usize },
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
    #[error("stretch {st} is below the minimum {minimum}; the ordering L_H <= L_G does not hold")]
    StretchBelowMinimum { st: f64, minimum: f64 },
    #[error(transparent)]
    Solver(#[from] SolverError),
    #[error(transparent)]
    Sparse(SparseError),
}

impl From<SparseError> for StretchError {
    fn from(e: SparseError) -> Self {
        match e {
            SparseError::NotATree(s) => Self::NotATree(s),
            SparseError::Disconnected { components } => Self::Disconnected { components },
            e => Self::Sparse(e),
        }
    }
}

pub type Result<T> = std::result::Result<T, StretchError>;
