//! Exact and iterative solvers for grounded Laplacians and SPD matrices:
//! dense Cholesky, linear-time tree factorization, greedy partial
//! elimination of low-degree vertices, and PCG with an energy-norm
//! certificate.

pub mod condition;
pub mod dense;
pub mod error;
pub mod graph_solver;
pub mod greedy;
pub mod pcg;
pub mod tree;

pub use condition::{estimate_condition_number, lambda_max, pencil_lambda_max};
pub use dense::{dense_logdet, DenseCholesky, GroundedDense};
pub use error::{Result, SolverError};
pub use graph_solver::{
    GraphSolver, GroundedInverse, IterativeSolver, PinnedInverse, PinnedLaplacian, PinnedSolve,
};
pub use greedy::{
    eliminate_with_fallback, greedy_eliminate, greedy_eliminate_graph, EliminationStep,
    PartialCholesky,
};
pub use pcg::{pcg_solve, PcgOptions, PcgResult};
pub use tree::{tree_factorize, tree_solve, TreeFactor};

/// Runs a solver grounded at `native` for a request grounded at `g`.
///
/// The grounded system at `g` is completed to a consistent Laplacian
/// system (entry `g` of the right-hand side set so the entries sum to
/// zero), solved with the native ground, and shifted so `x[g] = 0`.
pub fn reground(
    b: &[f64],
    g: usize,
    native: usize,
    x: &mut [f64],
    solve_native: impl FnOnce(&[f64], &mut [f64]),
) {
    if g == native {
        solve_native(b, x);
        x[g] = 0.0;
        return;
    }
    let mut c = b.to_vec();
    c[g] = 0.0;
    let total: f64 = c.iter().sum();
    c[g] = -total;
    solve_native(&c, x);
    let shift = x[g];
    for v in x.iter_mut() {
        *v -= shift;
    }
    x[g] = 0.0;
}
