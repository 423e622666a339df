use direct_solvers::{GraphSolver, PinnedSolve};
use rand::Rng;
use rayon::prelude::*;
use sparse_core::seed::{substream, tag};
use sparse_core::WeightedGraph;

use crate::error::{Result, StretchError};
use crate::exact::{require_connected, same_vertices, StretchMethod, StretchReport};

/// Johnson-Lindenstrauss constant in `k = ceil(C ln n / eps^2)`.
pub const SKETCH_CONSTANT: f64 = 24.0;

/// Random projection of the effective-resistance embedding of a graph:
/// `R(u, v) ~ |Z (e_u - e_v)|^2` with `Z = Q W^1/2 B L^+`.
#[derive(Debug, Clone)]
pub struct ResistanceSketch {
    n: usize,
    k: usize,
    /// Row `v` holds column `v` of `Z`.
    z: Vec<f64>,
    eps: f64,
}

impl ResistanceSketch {
    pub fn n(&self) -> usize {
        self.n
    }

    /// Number of projections.
    pub fn k(&self) -> usize {
        self.k
    }

    pub fn eps(&self) -> f64 {
        self.eps
    }

    pub fn query(&self, u: usize, v: usize) -> f64 {
        let a = &self.z[u * self.k..(u + 1) * self.k];
        let b = &self.z[v * self.k..(v + 1) * self.k];
        a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum()
    }
}

pub fn sketch_size(n: usize, eps: f64) -> usize {
    ((SKETCH_CONSTANT * (n as f64).ln() / (eps * eps)).ceil() as usize).max(1)
}

fn check_eps(eps: f64) -> Result<()> {
    if !(eps > 0.0 && eps < 1.0) {
        return Err(StretchError::InvalidParameter(format!(
            "eps = {eps} must lie in (0, 1)"
        )));
    }
    Ok(())
}

/// Builds a sketch answering effective-resistance queries in `h` to
/// within a factor `1 +- eps` with high probability.
pub fn approx_effective_resistances(
    h: &WeightedGraph,
    eps: f64,
    seed: u64,
) -> Result<ResistanceSketch> {
    check_eps(eps)?;
    require_connected(h)?;
    let n = h.n();
    let k = sketch_size(n, eps);
    let solver = GraphSolver::new(h, 1e-8)?;
    let scale = 1.0 / (k as f64).sqrt();
    let key = [tag("resistance-sketch")];
    let columns: Vec<Vec<f64>> = (0..k)
        .into_par_iter()
        .map(|i| {
            let mut rng = substream(seed, &key, i as u64);
            let mut y = vec![0.0; n];
            for e in h.edges() {
                let s = if rng.random::<bool>() { scale } else { -scale };
                let c = s * e.w.sqrt();
                y[e.u] += c;
                y[e.v] -= c;
            }
            let mut x = vec![0.0; n];
            solver.solve_pinned(&y, n - 1, &mut x);
            x
        })
        .collect();
    let mut z = vec![0.0; n * k];
    for (i, col) in columns.iter().enumerate() {
        for (v, &val) in col.iter().enumerate() {
            z[v * k + i] = val;
        }
    }
    Ok(ResistanceSketch { n, k, z, eps })
}

/// Sketched stretch of `G` over `H`.
pub fn approx_stretch(
    g: &WeightedGraph,
    h: &WeightedGraph,
    eps: f64,
    seed: u64,
) -> Result<StretchReport> {
    check_eps(eps)?;
    same_vertices(g, h)?;
    let sk = approx_effective_resistances(h, eps, seed)?;
    let per_edge: Vec<f64> = g.edges().iter().map(|e| e.w * sk.query(e.u, e.v)).collect();
    Ok(StretchReport {
        value: per_edge.iter().sum(),
        method: StretchMethod::Sketched,
        eps_sketch: Some(eps),
        per_edge: Some(per_edge),
    })
}
