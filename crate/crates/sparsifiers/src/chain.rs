use std::sync::atomic::{AtomicUsize, Ordering};

use direct_solvers::condition::{lambda_max, POWER_ITERATIONS, SAFETY_FACTOR};
use direct_solvers::{
    eliminate_with_fallback, greedy_eliminate_graph, pcg_solve, pencil_lambda_max, reground,
    GroundedDense, GroundedInverse, PartialCholesky, PcgOptions, PinnedInverse, PinnedLaplacian,
    PinnedSolve,
};
use rand::RngCore;
use reduction::grounded_laplacian;
use serde::{Deserialize, Serialize};
use sparse_core::seed::{stream, tag};
use sparse_core::{laplacian_of, SymmetricSparse, WeightedGraph};

use crate::error::{require_connected, Result};
use crate::incremental::tree_plus_sampled_edges;
use crate::lst::low_stretch_tree;

/// Graphs below this many vertices are factored densely.
pub const BASE_DIM: usize = 100;
/// Off-tree draws per level: `ceil(n / SAMPLE_DIVISOR)`.
pub const SAMPLE_DIVISOR: usize = 32;
/// Tolerance of the inner solves used while measuring the chain.
pub const MEASURE_NU: f64 = 1e-8;

/// One level: graph `A_i`, preconditioner `B_i = lambda (s T + S)` and the
/// greedy elimination of `s T + S` whose Schur complement is `A_{i+1}`.
#[derive(Debug, Clone)]
pub struct ChainLevel {
    pub graph: WeightedGraph,
    pub laplacian: SymmetricSparse,
    /// Unnormalized preconditioner `s T + S`.
    pub precond: WeightedGraph,
    pub partial: PartialCholesky,
    /// Surviving vertex used as the ground at this level.
    pub ground: usize,
    pub scale: f64,
    pub samples: usize,
    pub added: usize,
    pub tree_stretch: f64,
    /// Normalization of the preconditioner (measured).
    pub lambda: f64,
    /// `A_i <= B_i <= kappa A_i` (measured).
    pub kappa: f64,
    /// Condition number of the grounded `s T + S` (measured).
    pub kappa_b: f64,
    /// Minimum-degree eliminations forced because greedy elimination
    /// stalled.
    pub forced: usize,
    pub connected: bool,
}

impl ChainLevel {
    pub fn dim(&self) -> usize {
        self.graph.n()
    }

    pub fn next_dim(&self) -> usize {
        self.partial.survivors.len()
    }

    /// `ln` of the product of this level's elimination pivots.
    pub fn pivot_log_sum(&self) -> f64 {
        self.partial.log_pivot_sum()
    }
}

#[derive(Debug)]
pub enum BaseFactor {
    Single,
    Dense(GroundedDense),
}

/// Sequence of shrinking graphs ending in a small dense base case.
#[derive(Debug)]
pub struct PreconditionerChain {
    pub levels: Vec<ChainLevel>,
    pub base: WeightedGraph,
    pub base_factor: BaseFactor,
    pub cap: usize,
    /// The level cap was hit with the base still at or above `BASE_DIM`.
    pub capped: bool,
    failures: AtomicUsize,
}

/// Maximum chain length `ceil(log2 n) + 10`.
pub fn chain_cap(n: usize) -> usize {
    (n.max(1) as f64).log2().ceil() as usize + 10
}

fn eliminate(b: &WeightedGraph) -> (PartialCholesky, usize) {
    let mut pc = greedy_eliminate_graph(b);
    let mut forced = 0;
    while pc.survivors.len() == b.n() && b.n() > 1 {
        forced += 1;
        pc = eliminate_with_fallback(b, forced);
    }
    (pc, forced)
}

/// Builds the chain for a connected graph: at each level a low-stretch
/// tree plus `ceil(n / 32)` stretch-sampled edges, then greedy
/// elimination, until fewer than [`BASE_DIM`] vertices remain.
pub fn build_chain(g: &WeightedGraph, seed: u64) -> Result<PreconditionerChain> {
    require_connected(g)?;
    let cap = chain_cap(g.n());
    let mut levels = Vec::new();
    let mut cur = g.clone();
    while cur.n() >= BASE_DIM && levels.len() < cap {
        let i = levels.len() as u64;
        let (tree, report) =
            low_stretch_tree(&cur, stream(seed, &[tag("chain-tree"), i]).next_u64())?;
        let t = cur.n().div_ceil(SAMPLE_DIVISOR);
        let mut rng = stream(seed, &[tag("chain-sample"), i]);
        let parts = tree_plus_sampled_edges(&cur, &tree, &report, t, &mut rng)?;
        let (partial, forced) = eliminate(&parts.graph);
        let ground = *partial.survivors.last().expect("a survivor");
        let next = partial.remaining.clone();
        levels.push(ChainLevel {
            laplacian: laplacian_of(&cur),
            connected: cur.is_connected(),
            graph: cur,
            precond: parts.graph,
            partial,
            ground,
            scale: parts.scale,
            samples: parts.samples,
            added: parts.added,
            tree_stretch: parts.tree_stretch,
            lambda: 1.0,
            kappa: 1.0,
            kappa_b: 1.0,
            forced,
        });
        cur = next;
    }
    let capped = cur.n() >= BASE_DIM;
    let base_factor = if cur.n() <= 1 {
        BaseFactor::Single
    } else {
        BaseFactor::Dense(GroundedDense::new(&cur, cur.n() - 1)?)
    };
    let mut chain = PreconditionerChain {
        levels,
        base: cur,
        base_factor,
        cap,
        capped,
        failures: AtomicUsize::new(0),
    };
    chain.measure();
    Ok(chain)
}

impl PreconditionerChain {
    /// Measures `lambda`, `kappa` and `kappa_b` bottom-up; each level's
    /// solver relies on the measured `kappa` of the level below.
    fn measure(&mut self) {
        for i in (0..self.levels.len()).rev() {
            let (lambda, kappa_b) = {
                let lv = &self.levels[i];
                let g = lv.ground;
                let solver = ChainSolver::new(self, i, MEASURE_NU);
                let inv = GroundedInverse::new(&solver, g);
                let fb = grounded_laplacian(&lv.precond, g);
                let kappa_b = SAFETY_FACTOR
                    * lambda_max(&fb, POWER_ITERATIONS)
                    * lambda_max(&inv, POWER_ITERATIONS);
                let lambda = if lv.precond == lv.graph {
                    1.0
                } else {
                    let fa = grounded_laplacian(&lv.graph, g);
                    SAFETY_FACTOR * pencil_lambda_max(&fa, &inv, POWER_ITERATIONS)
                };
                (lambda, kappa_b.max(1.0))
            };
            let lv = &mut self.levels[i];
            lv.lambda = lambda;
            lv.kappa = if lv.precond == lv.graph {
                1.0
            } else {
                (lv.scale * lambda).max(1.0)
            };
            lv.kappa_b = kappa_b;
        }
        self.failures.store(0, Ordering::Relaxed);
    }

    pub fn n(&self) -> usize {
        self.levels.first().map_or(self.base.n(), |l| l.dim())
    }

    pub fn depth(&self) -> usize {
        self.levels.len()
    }

    /// `ln det` of the grounded base graph (0 for a single vertex).
    pub fn base_logdet(&self) -> f64 {
        match &self.base_factor {
            BaseFactor::Single => 0.0,
            BaseFactor::Dense(d) => d.logdet(),
        }
    }

    /// Everything in `ln det` of the grounded top graph except the
    /// remainders `ln det(B_i^-1 A_i)`: pivots, normalizations and base.
    pub fn deterministic_log_tau(&self) -> f64 {
        self.levels
            .iter()
            .map(|l| l.pivot_log_sum() + (l.dim() - 1) as f64 * l.lambda.ln())
            .sum::<f64>()
            + self.base_logdet()
    }

    /// PCG solves that missed their tolerance since the last reset.
    pub fn failures(&self) -> usize {
        self.failures.load(Ordering::Relaxed)
    }

    pub fn reset_failures(&self) {
        self.failures.store(0, Ordering::Relaxed);
    }

    /// Solves the grounded system of the graph below level `j - 1`
    /// (level `j`'s graph, or the base when `j` is the depth).
    fn solve_graph(&self, j: usize, b: &[f64], g: usize, x: &mut [f64], nu: f64) {
        if j == self.levels.len() {
            match &self.base_factor {
                BaseFactor::Single => x[0] = 0.0,
                BaseFactor::Dense(d) => d.solve_pinned(b, g, x),
            }
            return;
        }
        let lv = &self.levels[j];
        let mut rhs = b.to_vec();
        rhs[g] = 0.0;
        let op = PinnedLaplacian {
            lap: &lv.laplacian,
            ground: g,
        };
        let inner = ChainSolver::new(self, j, nu);
        let pre = PinnedInverse {
            solver: &inner,
            ground: g,
        };
        let r =
            pcg_solve(&op, &rhs, &pre, &PcgOptions::new(nu, lv.kappa)).expect("dimensions agree");
        if !r.converged {
            self.failures.fetch_add(1, Ordering::Relaxed);
        }
        x.copy_from_slice(&r.x);
    }

    pub fn summary(&self) -> ChainSummary {
        ChainSummary {
            levels: self
                .levels
                .iter()
                .map(|l| LevelSummary {
                    dim: l.dim(),
                    edges: l.graph.m(),
                    precond_edges: l.precond.m(),
                    next_dim: l.next_dim(),
                    tree_stretch: l.tree_stretch,
                    scale: l.scale,
                    samples: l.samples,
                    lambda: l.lambda,
                    kappa: l.kappa,
                    kappa_b: l.kappa_b,
                    pivot_log_sum: l.pivot_log_sum(),
                    forced: l.forced,
                    connected: l.connected,
                })
                .collect(),
            base_dim: self.base.n(),
            base_logdet: self.base_logdet(),
            cap: self.cap,
            capped: self.capped,
        }
    }
}

/// Applies `(s T + S)^-1` of one level through its partial Cholesky
/// factor, solving the Schur complement with the rest of the chain.
pub struct ChainSolver<'a> {
    chain: &'a PreconditionerChain,
    level: usize,
    nu: f64,
}

impl<'a> ChainSolver<'a> {
    pub fn new(chain: &'a PreconditionerChain, level: usize, nu: f64) -> Self {
        Self { chain, level, nu }
    }

    pub fn level(&self) -> &ChainLevel {
        &self.chain.levels[self.level]
    }

    fn solve_native(&self, b: &[f64], x: &mut [f64]) {
        let lv = self.level();
        let pc = &lv.partial;
        let g = lv.ground;
        let mut y = b.to_vec();
        y[g] = 0.0;
        pc.forward(&mut y, g);
        let k = pc.survivors.len();
        let yl: Vec<f64> = pc.survivors.iter().map(|&v| y[v]).collect();
        let mut xl = vec![0.0; k];
        if k > 1 {
            self.chain
                .solve_graph(self.level + 1, &yl, pc.local[g], &mut xl, self.nu);
        }
        x.fill(0.0);
        for (i, &v) in pc.survivors.iter().enumerate() {
            x[v] = xl[i];
        }
        x[g] = 0.0;
        pc.backward(&y, x);
    }
}

impl PinnedSolve for ChainSolver<'_> {
    fn n(&self) -> usize {
        self.level().dim()
    }
    fn solve_pinned(&self, b: &[f64], g: usize, x: &mut [f64]) {
        reground(b, g, self.level().ground, x, |c, x| self.solve_native(c, x));
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LevelSummary {
    pub dim: usize,
    pub edges: usize,
    pub precond_edges: usize,
    pub next_dim: usize,
    pub tree_stretch: f64,
    pub scale: f64,
    pub samples: usize,
    pub lambda: f64,
    pub kappa: f64,
    pub kappa_b: f64,
    pub pivot_log_sum: f64,
    pub forced: usize,
    pub connected: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ChainSummary {
    pub levels: Vec<LevelSummary>,
    pub base_dim: usize,
    pub base_logdet: f64,
    pub cap: usize,
    pub capped: bool,
}
