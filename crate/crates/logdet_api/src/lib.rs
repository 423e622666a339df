//! Estimators of `n^-1 ln det A` for symmetric diagonally dominant `A`:
//! the matrix is reduced to two graph Laplacians whose
//! pseudo-log-determinants are computed from exact factorizations of
//! preconditioners plus Monte Carlo estimates of the remainders.

mod allocate;
pub mod error;
pub mod estimators;
mod pipeline;
pub mod report;

pub use error::{LogdetError, Result};
pub use estimators::{
    bounds_report, fast_inexact_logdet, logdet_bounds, tree_logdet, ultra_logdet, FAST_INNER_EPS,
    FAST_SPARSIFY_EPS,
};
pub use report::{
    ChainReport, EstimateOptions, EstimateReport, LevelReport, Method, Side, DEFAULT_MAX_WORK,
};
