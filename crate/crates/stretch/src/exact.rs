use direct_solvers::{GraphSolver, PinnedSolve};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use sparse_core::{connected_components, PathOracle, RootedTree, WeightedGraph};

use crate::error::{Result, StretchError};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum StretchMethod {
    ExactTree,
    ExactSolve,
    Sketched,
}

/// Generalized stretch `st_H(G) = sum_e w_e R_H(e)` of `G` with respect
/// to `H`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StretchReport {
    pub value: f64,
    pub method: StretchMethod,
    pub eps_sketch: Option<f64>,
    /// Stretch of each edge of `G`, in `G.edges()` order.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub per_edge: Option<Vec<f64>>,
}

impl StretchReport {
    fn new(per_edge: Vec<f64>, method: StretchMethod, eps_sketch: Option<f64>) -> Self {
        Self {
            value: per_edge.iter().sum(),
            method,
            eps_sketch,
            per_edge: Some(per_edge),
        }
    }
}

pub(crate) fn same_vertices(g: &WeightedGraph, h: &WeightedGraph) -> Result<()> {
    if g.n() != h.n() {
        return Err(StretchError::VertexMismatch {
            expected: g.n(),
            got: h.n(),
        });
    }
    Ok(())
}

pub(crate) fn require_connected(g: &WeightedGraph) -> Result<()> {
    let c = connected_components(g);
    if c.count > 1 {
        return Err(StretchError::Disconnected {
            components: c.count,
        });
    }
    Ok(())
}

/// Stretch of `G` over a spanning tree `T`: each edge's weight times the
/// resistance of its tree path.
pub fn tree_stretch_exact(g: &WeightedGraph, t: &WeightedGraph) -> Result<StretchReport> {
    same_vertices(g, t)?;
    if g.n() == 0 {
        return Ok(StretchReport::new(
            Vec::new(),
            StretchMethod::ExactTree,
            None,
        ));
    }
    let rooted = RootedTree::new(t, 0)?;
    let paths = PathOracle::new(&rooted);
    let per_edge = g
        .edges()
        .iter()
        .map(|e| e.w * paths.resistance(e.u, e.v))
        .collect();
    Ok(StretchReport::new(per_edge, StretchMethod::ExactTree, None))
}

/// Stretch of `G` over an arbitrary connected `H`, one grounded solve
/// per edge of `G`.
pub fn generalized_stretch_exact(g: &WeightedGraph, h: &WeightedGraph) -> Result<StretchReport> {
    same_vertices(g, h)?;
    require_connected(h)?;
    let solver = GraphSolver::new(h, 1e-12)?;
    let n = h.n();
    let per_edge = g
        .edges()
        .par_iter()
        .map(|e| {
            let mut b = vec![0.0; n];
            b[e.u] = 1.0;
            let mut x = vec![0.0; n];
            solver.solve_pinned(&b, e.v, &mut x);
            e.w * x[e.u]
        })
        .collect();
    Ok(StretchReport::new(
        per_edge,
        StretchMethod::ExactSolve,
        None,
    ))
}
