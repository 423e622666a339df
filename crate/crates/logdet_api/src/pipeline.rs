use direct_solvers::{tree_factorize, GroundedInverse, PinnedSolve, TreeFactor};
use rand::RngCore;
use reduction::{grounded_laplacian, kelner_reduce};
use sparse_core::seed::{stream, tag};
use sparse_core::{
    connected_components, split_components, Component, LinearOperator, SymmetricSparse,
    WeightedGraph,
};
use sparsifiers::{low_stretch_tree, ChainSolver, PreconditionerChain};
use stretch::pld_bounds_from_stretch;
use trace_estimator::ApproxInverse;

use crate::error::{LogdetError, Result};
use crate::report::Side;

/// `A` reduced to two Laplacians, each split into connected components.
pub(crate) struct Reduced {
    pub n: usize,
    pub sides: [(Side, Vec<Component>); 2],
}

pub(crate) fn reduce(a: &SymmetricSparse) -> Result<Reduced> {
    let pair = kelner_reduce(a)?;
    let n = a.n();
    // A block of A is singular exactly when its two copies in the doubled
    // graph stay disconnected from each other.
    let labels = connected_components(&pair.g_tilde).labels;
    if let Some(row) = (0..n).find(|&i| labels[i] != labels[n + i]) {
        return Err(LogdetError::Singular { row });
    }
    Ok(Reduced {
        n,
        sides: [
            (Side::Tilde, split_components(&pair.g_tilde)),
            (Side::Hat, split_components(&pair.g_hat)),
        ],
    })
}

/// Seed for the randomized constructions on one component.
pub(crate) fn component_seed(seed: u64, label: &str, side: Side, c: usize) -> u64 {
    stream(seed, &[tag(label), side as u64, c as u64]).next_u64()
}

/// Tree-stretch bounds on `pld` of one connected graph, with the tree.
pub(crate) struct TreeBound {
    pub tree: WeightedGraph,
    pub stretch: f64,
    pub lower: f64,
    pub upper: f64,
}

pub(crate) fn tree_bound(g: &WeightedGraph, seed: u64) -> Result<TreeBound> {
    let n = g.n();
    if n <= 1 {
        return Ok(TreeBound {
            tree: g.clone(),
            stretch: 0.0,
            lower: 0.0,
            upper: 0.0,
        });
    }
    let (tree, report) = low_stretch_tree(g, seed)?;
    let tree_pld = (n as f64).ln() + tree_factorize(&tree, n - 1)?.logdet();
    let (lower, upper) = pld_bounds_from_stretch(tree_pld, report.value, n)?;
    Ok(TreeBound {
        tree,
        stretch: report.value,
        lower,
        upper,
    })
}

pub(crate) enum JobKind {
    /// Single vertex: `pld = 0`.
    Trivial,
    /// Preconditioned by `st * T` for a spanning subtree `T`.
    Tree {
        factor: TreeFactor,
        stretch: f64,
    },
    Chain(PreconditionerChain),
}

/// One connected component of one side, with its preconditioner.
pub(crate) struct Job {
    pub side: Side,
    pub component: usize,
    pub graph: WeightedGraph,
    pub kind: JobKind,
}

impl Job {
    fn tree_needs_mc(&self, stretch: f64) -> bool {
        stretch > (self.graph.n() - 1) as f64 * (1.0 + 1e-12)
    }

    /// The part of `pld` computed exactly.
    pub fn deterministic_pld(&self) -> f64 {
        let n = self.graph.n();
        match &self.kind {
            JobKind::Trivial => 0.0,
            JobKind::Tree { factor, stretch } => {
                let mut pld = (n as f64).ln() + factor.logdet();
                if self.tree_needs_mc(*stretch) {
                    pld += (n - 1) as f64 * stretch.ln();
                }
                pld
            }
            JobKind::Chain(c) => (n as f64).ln() + c.deterministic_log_tau(),
        }
    }

    /// The Monte Carlo remainder runs this job needs; each contributes
    /// `dim * estimate` to `pld`.
    pub fn runs(&self, job: usize) -> Vec<RunSpec<'_>> {
        let n = self.graph.n();
        match &self.kind {
            JobKind::Trivial => Vec::new(),
            JobKind::Tree { factor, stretch } => {
                if !self.tree_needs_mc(*stretch) {
                    return Vec::new();
                }
                let g = factor.ground();
                vec![RunSpec {
                    job,
                    level: 0,
                    a: grounded_laplacian(&self.graph, g),
                    solver: SolverRef::Tree(factor),
                    ground: g,
                    scale: 1.0 / stretch,
                    kappa: *stretch,
                    kappa_b: None,
                    dim: n - 1,
                    edges: (self.graph.m(), n - 1),
                    nu: 0.0,
                }]
            }
            JobKind::Chain(chain) => chain
                .levels
                .iter()
                .enumerate()
                .filter(|(_, l)| l.kappa > 1.0)
                .map(|(i, l)| RunSpec {
                    job,
                    level: i,
                    a: grounded_laplacian(&l.graph, l.ground),
                    solver: SolverRef::Chain(chain, i),
                    ground: l.ground,
                    scale: 1.0 / l.lambda,
                    kappa: l.kappa,
                    kappa_b: Some(l.kappa_b),
                    dim: l.dim() - 1,
                    edges: (l.graph.m(), l.precond.m()),
                    nu: 0.0,
                })
                .collect(),
        }
    }

    pub fn chain(&self) -> Option<&PreconditionerChain> {
        match &self.kind {
            JobKind::Chain(c) => Some(c),
            _ => None,
        }
    }
}

#[derive(Clone, Copy)]
pub(crate) enum SolverRef<'a> {
    Tree(&'a TreeFactor),
    /// Level `i` of a chain.
    Chain(&'a PreconditionerChain, usize),
}

/// One remainder `ln det(B^-1 A) / dim` with `A` the grounded Laplacian
/// and `B^-1 = scale * F^-1` for the preconditioner `F`.
pub(crate) struct RunSpec<'a> {
    pub job: usize,
    pub level: usize,
    pub a: SymmetricSparse,
    pub solver: SolverRef<'a>,
    pub ground: usize,
    pub scale: f64,
    pub kappa: f64,
    pub kappa_b: Option<f64>,
    pub dim: usize,
    pub edges: (usize, usize),
    /// Tolerance of the inner chain solves (unused for trees).
    pub nu: f64,
}

enum Bound<'a> {
    Tree(&'a TreeFactor),
    Chain(ChainSolver<'a>),
}

impl PinnedSolve for Bound<'_> {
    fn n(&self) -> usize {
        match self {
            Bound::Tree(t) => t.n(),
            Bound::Chain(c) => c.n(),
        }
    }
    fn solve_pinned(&self, b: &[f64], g: usize, x: &mut [f64]) {
        match self {
            Bound::Tree(t) => t.solve_pinned(b, g, x),
            Bound::Chain(c) => c.solve_pinned(b, g, x),
        }
    }
}

/// `B^-1` of a run on the grounded coordinates.
pub(crate) struct RunInverse<'a> {
    solver: Bound<'a>,
    ground: usize,
    scale: f64,
}

impl ApproxInverse for RunInverse<'_> {
    fn dim(&self) -> usize {
        self.solver.n() - 1
    }
    fn solve(&self, b: &[f64], x: &mut [f64]) -> bool {
        GroundedInverse {
            solver: &self.solver,
            ground: self.ground,
            scale: self.scale,
        }
        .apply(b, x);
        true
    }
}

impl<'a> RunSpec<'a> {
    pub fn inverse(&self) -> RunInverse<'a> {
        RunInverse {
            solver: match self.solver {
                SolverRef::Tree(t) => Bound::Tree(t),
                SolverRef::Chain(c, i) => Bound::Chain(ChainSolver::new(c, i, self.nu)),
            },
            ground: self.ground,
            scale: self.scale,
        }
    }

    pub fn failures(&self) -> usize {
        match self.solver {
            SolverRef::Tree(_) => 0,
            SolverRef::Chain(c, _) => c.failures(),
        }
    }
}
