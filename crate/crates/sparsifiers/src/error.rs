use direct_solvers::SolverError;
use sparse_core::SparseError;
use stretch::StretchError;
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum SparsifyError {
    #[error("graph is disconnected ({components} components)")]
    Disconnected { components: usize },
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
    #[error("sparsifier was disconnected in all {attempts} attempts")]
    SparsificationFailed { attempts: usize },
    #[error(transparent)]
    Stretch(#[from] StretchError),
    #[error(transparent)]
    Solver(#[from] SolverError),
    #[error(transparent)]
    Sparse(#[from] SparseError),
}

pub type Result<T> = std::result::Result<T, SparsifyError>;

pub(crate) fn require_connected(g: &sparse_core::WeightedGraph) -> Result<()> {
    let c = sparse_core::connected_components(g);
    if c.count > 1 {
        return Err(SparsifyError::Disconnected {
            components: c.count,
        });
    }
    Ok(())
}
