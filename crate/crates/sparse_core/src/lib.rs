//! Symmetric sparse matrices, weighted graphs and the small amount of
//! shared plumbing (linear-operator trait, seeded streams) used by the
//! log-determinant crates.

pub mod error;
pub mod graph;
pub mod matrix;
pub mod ops;
pub mod seed;
pub mod tree;

pub use error::{Result, SparseError};
pub use graph::{
    connected_components, graph_of, laplacian_of, split_components, Adjacency, Component,
    Components, Edge, WeightedGraph,
};
pub use matrix::{is_sdd, matvec, SymmetricSparse};
pub use ops::LinearOperator;
pub use tree::{PathOracle, RootedTree};
