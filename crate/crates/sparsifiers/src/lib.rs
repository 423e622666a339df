//! Preconditioner construction for graph Laplacians: low-stretch spanning
//! trees, spectral sparsifiers, incremental (tree plus sampled edges)
//! sparsifiers and the preconditioning chain built from them.

pub mod chain;
pub mod error;
pub mod incremental;
pub mod lst;
pub mod spectral;

pub use chain::{
    build_chain, chain_cap, ChainLevel, ChainSolver, ChainSummary, LevelSummary,
    PreconditionerChain, BASE_DIM, SAMPLE_DIVISOR,
};
pub use error::{Result, SparsifyError};
pub use incremental::{
    incremental_sparsify, incremental_sparsify_with_samples, tree_plus_sampled_edges, tree_scale,
    IncrementalSparsifier, TreePlusEdges,
};
pub use lst::low_stretch_tree;
pub use spectral::{sample_count, spectral_sparsify};
