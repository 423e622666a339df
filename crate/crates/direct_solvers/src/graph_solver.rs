use std::sync::atomic::{AtomicUsize, Ordering};

use sparse_core::tree::shortest_path_tree;
use sparse_core::{laplacian_of, LinearOperator, SymmetricSparse, WeightedGraph};

use crate::condition::{pencil_lambda_max, SAFETY_FACTOR};
use crate::dense::GroundedDense;
use crate::error::Result;
use crate::pcg::{pcg_solve, PcgOptions};
use crate::tree::{tree_factorize, TreeFactor};

/// Solves grounded Laplacian systems of one connected graph.
///
/// Vectors are full length: `b[g]` is ignored and `x[g] = 0` on return,
/// for any ground `g` the caller picks.
pub trait PinnedSolve: Sync {
    fn n(&self) -> usize;
    fn solve_pinned(&self, b: &[f64], g: usize, x: &mut [f64]);
}

impl PinnedSolve for TreeFactor {
    fn n(&self) -> usize {
        TreeFactor::n(self)
    }
    fn solve_pinned(&self, b: &[f64], g: usize, x: &mut [f64]) {
        TreeFactor::solve_pinned(self, b, g, x)
    }
}

impl PinnedSolve for GroundedDense {
    fn n(&self) -> usize {
        GroundedDense::n(self)
    }
    fn solve_pinned(&self, b: &[f64], g: usize, x: &mut [f64]) {
        GroundedDense::solve_pinned(self, b, g, x)
    }
}

/// `scale * F_g^-1` as an operator on the `n - 1` grounded coordinates.
pub struct GroundedInverse<'a, S: ?Sized> {
    pub solver: &'a S,
    pub ground: usize,
    pub scale: f64,
}

impl<'a, S: PinnedSolve + ?Sized> GroundedInverse<'a, S> {
    pub fn new(solver: &'a S, ground: usize) -> Self {
        Self {
            solver,
            ground,
            scale: 1.0,
        }
    }
}

impl<S: PinnedSolve + ?Sized> LinearOperator for GroundedInverse<'_, S> {
    fn dim(&self) -> usize {
        self.solver.n() - 1
    }
    fn apply(&self, x: &[f64], y: &mut [f64]) {
        let g = self.ground;
        let n = self.solver.n();
        let mut b = Vec::with_capacity(n);
        b.extend_from_slice(&x[..g]);
        b.push(0.0);
        b.extend_from_slice(&x[g..]);
        let mut out = vec![0.0; n];
        self.solver.solve_pinned(&b, g, &mut out);
        for (i, yi) in y.iter_mut().enumerate() {
            let v = out[if i < g { i } else { i + 1 }];
            *yi = self.scale * v;
        }
    }
}

/// Full-length Laplacian operator with coordinate `g` frozen at zero;
/// on that subspace it acts as the grounded matrix `F_g`.
pub struct PinnedLaplacian<'a> {
    pub lap: &'a SymmetricSparse,
    pub ground: usize,
}

impl LinearOperator for PinnedLaplacian<'_> {
    fn dim(&self) -> usize {
        self.lap.n()
    }
    fn apply(&self, x: &[f64], y: &mut [f64]) {
        self.lap.apply(x, y);
        y[self.ground] = 0.0;
    }
}

/// A [`PinnedSolve`] at a fixed ground, as a full-length operator.
pub struct PinnedInverse<'a, S: ?Sized> {
    pub solver: &'a S,
    pub ground: usize,
}

impl<S: PinnedSolve + ?Sized> LinearOperator for PinnedInverse<'_, S> {
    fn dim(&self) -> usize {
        self.solver.n()
    }
    fn apply(&self, x: &[f64], y: &mut [f64]) {
        self.solver.solve_pinned(x, self.ground, y);
    }
}

/// Grounded Laplacian solver: PCG preconditioned by a spanning tree.
#[derive(Debug)]
pub struct IterativeSolver {
    lap: SymmetricSparse,
    tree: TreeFactor,
    kappa: f64,
    nu: f64,
    failures: AtomicUsize,
}

impl IterativeSolver {
    pub fn new(g: &WeightedGraph, tree: &WeightedGraph, nu: f64) -> Result<Self> {
        let ground = g.n() - 1;
        let tf = tree_factorize(tree, ground)?;
        let f = reduction::grounded_laplacian(g, ground);
        let lam = pencil_lambda_max(&f, &GroundedInverse::new(&tf, ground), 30);
        Ok(Self {
            lap: laplacian_of(g),
            tree: tf,
            // A spanning subtree satisfies T <= G, so the pencil is >= 1.
            kappa: (SAFETY_FACTOR * lam).max(1.0),
            nu,
            failures: AtomicUsize::new(0),
        })
    }

    pub fn kappa(&self) -> f64 {
        self.kappa
    }

    /// Number of solves that hit the iteration cap.
    pub fn failures(&self) -> usize {
        self.failures.load(Ordering::Relaxed)
    }
}

impl PinnedSolve for IterativeSolver {
    fn n(&self) -> usize {
        self.lap.n()
    }
    fn solve_pinned(&self, b: &[f64], g: usize, x: &mut [f64]) {
        let mut rhs = b.to_vec();
        rhs[g] = 0.0;
        let op = PinnedLaplacian {
            lap: &self.lap,
            ground: g,
        };
        let pre = PinnedInverse {
            solver: &self.tree,
            ground: g,
        };
        let r = pcg_solve(&op, &rhs, &pre, &PcgOptions::new(self.nu, self.kappa))
            .expect("dimensions agree");
        if !r.converged {
            self.failures.fetch_add(1, Ordering::Relaxed);
        }
        x.copy_from_slice(&r.x);
    }
}

/// Picks an exact or iterative grounded solver for a connected graph.
#[derive(Debug)]
pub enum GraphSolver {
    Single,
    Tree(TreeFactor),
    Dense(GroundedDense),
    Iterative(IterativeSolver),
}

/// Largest vertex count factored densely by [`GraphSolver::new`].
pub const DENSE_SOLVER_MAX: usize = 1200;

impl GraphSolver {
    /// `nu` is the relative energy-norm tolerance of iterative solves.
    pub fn new(g: &WeightedGraph, nu: f64) -> Result<Self> {
        let n = g.n();
        if n <= 1 {
            return Ok(Self::Single);
        }
        if g.is_tree() {
            return Ok(Self::Tree(tree_factorize(g, n - 1)?));
        }
        if n <= DENSE_SOLVER_MAX {
            return Ok(Self::Dense(GroundedDense::new(g, n - 1)?));
        }
        let deg = g.degrees();
        let root = (0..n)
            .max_by(|&a, &b| deg[a].total_cmp(&deg[b]).then(b.cmp(&a)))
            .unwrap();
        let tree = shortest_path_tree(g, root)?;
        Ok(Self::Iterative(IterativeSolver::new(g, &tree, nu)?))
    }

    pub fn failures(&self) -> usize {
        match self {
            Self::Iterative(s) => s.failures(),
            _ => 0,
        }
    }
}

impl PinnedSolve for GraphSolver {
    fn n(&self) -> usize {
        match self {
            Self::Single => 1,
            Self::Tree(t) => t.n(),
            Self::Dense(d) => d.n(),
            Self::Iterative(s) => s.n(),
        }
    }
    fn solve_pinned(&self, b: &[f64], g: usize, x: &mut [f64]) {
        match self {
            Self::Single => x[0] = 0.0,
            Self::Tree(t) => t.solve_pinned(b, g, x),
            Self::Dense(d) => d.solve_pinned(b, g, x),
            Self::Iterative(s) => s.solve_pinned(b, g, x),
        }
    }
}
