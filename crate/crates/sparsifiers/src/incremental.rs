use std::collections::BTreeSet;

use direct_solvers::condition::{POWER_ITERATIONS, SAFETY_FACTOR};
use direct_solvers::{pencil_lambda_max, GraphSolver, GroundedInverse};
use rand::distr::weighted::WeightedIndex;
use rand::distr::Distribution;
use rand::Rng;
use reduction::grounded_laplacian;
use sparse_core::seed::{stream, tag};
use sparse_core::WeightedGraph;
use stretch::StretchReport;

use crate::error::{require_connected, Result, SparsifyError};
use crate::lst::low_stretch_tree;

/// `s T + S` for a spanning subtree `T` and distinct off-tree edges `S`.
#[derive(Debug, Clone)]
pub struct TreePlusEdges {
    pub graph: WeightedGraph,
    pub scale: f64,
    /// Off-tree draws requested.
    pub samples: usize,
    /// Distinct off-tree edges kept.
    pub added: usize,
    pub tree_stretch: f64,
}

/// Tree scale `ceil(sqrt(st ln n / t))`, or 1 when nothing is sampled.
pub fn tree_scale(st: f64, n: usize, t: usize) -> f64 {
    if t == 0 {
        return 1.0;
    }
    (st * (n as f64).ln() / t as f64).sqrt().ceil().max(1.0)
}

/// Scales the tree by `s` and adds the distinct edges among `t` draws
/// from the off-tree edges of `g`, taken with probability proportional to
/// their stretch; sampled edges keep their weight.
pub fn tree_plus_sampled_edges<R: Rng>(
    g: &WeightedGraph,
    tree: &WeightedGraph,
    report: &StretchReport,
    t: usize,
    rng: &mut R,
) -> Result<TreePlusEdges> {
    let in_tree: BTreeSet<(usize, usize)> = tree
        .edges()
        .iter()
        .map(|e| (e.u.min(e.v), e.u.max(e.v)))
        .collect();
    let per_edge = report.per_edge.as_ref().expect("per-edge stretch");
    let off: Vec<usize> = (0..g.m())
        .filter(|&i| {
            !in_tree.contains(&(
                g.edges()[i].u.min(g.edges()[i].v),
                g.edges()[i].u.max(g.edges()[i].v),
            ))
        })
        .collect();
    let t = if off.is_empty() { 0 } else { t };
    let scale = tree_scale(report.value, g.n(), t);
    let mut chosen = BTreeSet::new();
    if t > 0 {
        let dist = WeightedIndex::new(off.iter().map(|&i| per_edge[i]))
            .map_err(|e| SparsifyError::InvalidParameter(e.to_string()))?;
        for _ in 0..t {
            chosen.insert(off[dist.sample(rng)]);
        }
    }
    let graph = WeightedGraph::new(
        g.n(),
        tree.edges()
            .iter()
            .map(|e| (e.u, e.v, scale * e.w))
            .chain(chosen.iter().map(|&i| {
                let e = g.edges()[i];
                (e.u, e.v, e.w)
            })),
    )?;
    Ok(TreePlusEdges {
        graph,
        scale,
        samples: t,
        added: chosen.len(),
        tree_stretch: report.value,
    })
}

/// A near-tree preconditioner `B` of `G`, normalized so that
/// `B / kappa <= G <= B` holds up to the accuracy of the measured
/// `lambda`.
#[derive(Debug, Clone)]
pub struct IncrementalSparsifier {
    /// `lambda * (s T + S)`.
    pub graph: WeightedGraph,
    pub tree: WeightedGraph,
    pub parts: TreePlusEdges,
    /// Inflated power-iteration estimate of `lambda_max((sT + S)^+ G)`.
    pub lambda: f64,
    /// `s * lambda`.
    pub kappa: f64,
}

/// [`incremental_sparsify`] with an explicit number of off-tree draws.
pub fn incremental_sparsify_with_samples(
    g: &WeightedGraph,
    t: usize,
    seed: u64,
) -> Result<IncrementalSparsifier> {
    require_connected(g)?;
    let (tree, report) = low_stretch_tree(g, seed)?;
    let mut rng = stream(seed, &[tag("incremental-sparsify")]);
    let parts = tree_plus_sampled_edges(g, &tree, &report, t, &mut rng)?;
    let n = g.n();
    let lambda = if parts.graph == *g || n <= 1 {
        1.0
    } else {
        let solver = GraphSolver::new(&parts.graph, 1e-10)?;
        let f = grounded_laplacian(g, n - 1);
        SAFETY_FACTOR
            * pencil_lambda_max(&f, &GroundedInverse::new(&solver, n - 1), POWER_ITERATIONS)
    };
    Ok(IncrementalSparsifier {
        graph: parts.graph.scaled(lambda),
        kappa: parts.scale * lambda,
        tree,
        parts,
        lambda,
    })
}

/// Low-stretch tree scaled up plus stretch-sampled off-tree edges, with
/// the number of draws `t = ceil(st ln n / target_kappa)`.
pub fn incremental_sparsify(
    g: &WeightedGraph,
    target_kappa: f64,
    seed: u64,
) -> Result<IncrementalSparsifier> {
    if !(target_kappa > 1.0) {
        return Err(SparsifyError::InvalidParameter(format!(
            "target kappa {target_kappa} must exceed 1"
        )));
    }
    require_connected(g)?;
    let (_, report) = low_stretch_tree(g, seed)?;
    let t = (report.value * (g.n().max(2) as f64).ln() / target_kappa).ceil() as usize;
    incremental_sparsify_with_samples(g, t, seed)
}
