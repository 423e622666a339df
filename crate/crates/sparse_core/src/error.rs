use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum SparseError {
    #[error("index ({row}, {col}) out of range for dimension {n}")]
    IndexOutOfRange { row: usize, col: usize, n: usize },
    #[error("entry ({row}, {col}) given as {upper} but its mirror as {lower}")]
    AsymmetricInput {
        row: usize,
        col: usize,
        upper: f64,
        lower: f64,
    },
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },
    #[error("not a Laplacian: {0}")]
    NotALaplacian(String),
    #[error("invalid edge ({u}, {v}, {w}): {reason}")]
    InvalidEdge {
        u: usize,
        v: usize,
        w: f64,
        reason: &'static str,
    },
    #[error("not a spanning tree: {0}")]
    NotATree(String),
    #[error("graph is disconnected ({components} components)")]
    Disconnected { components: usize },
}

pub type Result<T> = std::result::Result<T, SparseError>;
