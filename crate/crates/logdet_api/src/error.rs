use direct_solvers::SolverError;
use reduction::ReductionError;
use sparse_core::SparseError;
use sparsifiers::SparsifyError;
use stretch::StretchError;
use thiserror::Error;
use trace_estimator::TraceError;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum LogdetError {
    #[error("matrix is not SDD: row {row} has slack {slack:e}")]
    NotSdd { row: usize, slack: f64 },
    #[error("matrix is singular (block containing row {row})")]
    Singular { row: usize },
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
    #[error(transparent)]
    Reduction(ReductionError),
    #[error(transparent)]
    Sparsify(#[from] SparsifyError),
    #[error(transparent)]
    Stretch(#[from] StretchError),
    #[error(transparent)]
    Trace(#[from] TraceError),
    #[error(transparent)]
    Solver(#[from] SolverError),
    #[error(transparent)]
    Sparse(#[from] SparseError),
}

impl From<ReductionError> for LogdetError {
    fn from(e: ReductionError) -> Self {
        match e {
            ReductionError::NotSdd { row, slack } => Self::NotSdd { row, slack },
            e => Self::Reduction(e),
        }
    }
}

pub type Result<T> = std::result::Result<T, LogdetError>;
