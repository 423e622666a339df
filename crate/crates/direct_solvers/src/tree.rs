use sparse_core::{RootedTree, WeightedGraph};

use crate::error::{Result, SolverError};
use crate::reground;

/// `L_T = P L D L^T P^T` for a tree Laplacian, eliminating leaves first.
///
/// Eliminating a leaf leaves a tree, and the pivot of each vertex is the
/// conductance of the edge to its parent, so the unit lower factor is
/// fully described by parent pointers.
#[derive(Debug, Clone)]
pub struct TreeFactor {
    /// Elimination order; the ground (root) comes last.
    pub perm: Vec<usize>,
    /// Pivot per position of `perm`; the trailing entry is the structural
    /// zero of the root.
    pub pivots: Vec<f64>,
    /// Parent pointer per vertex (`parent[root] == root`).
    pub parent: Vec<usize>,
    /// `(vertex, parent, 1 / pivot)` in elimination order, root excluded.
    steps: Vec<(usize, usize, f64)>,
    ground: usize,
}

pub fn tree_factorize(t: &WeightedGraph, ground: usize) -> Result<TreeFactor> {
    let rooted = RootedTree::new(t, ground).map_err(|e| SolverError::NotATree(e.to_string()))?;
    let perm: Vec<usize> = rooted.order.iter().rev().copied().collect();
    let pivots = perm.iter().map(|&v| rooted.parent_weight[v]).collect();
    let steps = perm[..perm.len() - 1]
        .iter()
        .map(|&v| (v, rooted.parent[v], 1.0 / rooted.parent_weight[v]))
        .collect();
    Ok(TreeFactor {
        perm,
        pivots,
        parent: rooted.parent,
        steps,
        ground,
    })
}

impl TreeFactor {
    pub fn n(&self) -> usize {
        self.parent.len()
    }

    pub fn ground(&self) -> usize {
        self.ground
    }

    /// `log det` of the grounded tree Laplacian.
    pub fn logdet(&self) -> f64 {
        self.pivots[..self.n() - 1].iter().map(|p| p.ln()).sum()
    }

    /// Full-length pinned solve at any ground `g` (`b[g]` ignored,
    /// `x[g] = 0`).
    pub fn solve_pinned(&self, b: &[f64], g: usize, x: &mut [f64]) {
        reground(b, g, self.ground, x, |rhs, out| {
            let mut y = rhs.to_vec();
            y[self.ground] = 0.0;
            for &(v, p, _) in &self.steps {
                y[p] += y[v];
            }
            out[self.ground] = 0.0;
            for &(v, p, inv) in self.steps.iter().rev() {
                out[v] = y[v] * inv + out[p];
            }
        });
    }
}

/// Solves the grounded system `F_T x = b` (`b` has length `n - 1`, indices
/// after the ground shifted down by one).
pub fn tree_solve(f: &TreeFactor, b: &[f64]) -> Result<Vec<f64>> {
    let n = f.n();
    if b.len() + 1 != n {
        return Err(SolverError::DimensionMismatch {
            expected: n - 1,
            got: b.len(),
        });
    }
    let g = f.ground;
    let mut full = Vec::with_capacity(n);
    full.extend_from_slice(&b[..g]);
    full.push(0.0);
    full.extend_from_slice(&b[g..]);
    let mut x = vec![0.0; n];
    f.solve_pinned(&full, g, &mut x);
    x.remove(g);
    Ok(x)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn path3_pivots() {
        let t = WeightedGraph::new(3, [(0, 1, 1.0), (1, 2, 1.0)]).unwrap();
        let f = tree_factorize(&t, 2).unwrap();
        assert_eq!(f.pivots, vec![1.0, 1.0, 0.0]);
        assert_eq!(f.perm, vec![0, 1, 2]);
        assert_eq!(f.logdet(), 0.0);
    }

    #[test]
    fn star_pivots() {
        let t = WeightedGraph::new(4, [(0, 1, 1.0), (0, 2, 1.0), (0, 3, 1.0)]).unwrap();
        let f = tree_factorize(&t, 3).unwrap();
        assert_eq!(&f.pivots[..3], &[1.0, 1.0, 1.0]);
        assert_eq!(*f.perm.last().unwrap(), 3);
    }

    #[test]
    fn single_edge() {
        let t = WeightedGraph::new(2, [(0, 1, 5.0)]).unwrap();
        let f = tree_factorize(&t, 1).unwrap();
        assert_eq!(f.pivots, vec![5.0, 0.0]);
        assert!((f.logdet() - 5f64.ln()).abs() < 1e-15);
        let p2 = WeightedGraph::new(2, [(0, 1, 1.0)]).unwrap();
        let f = tree_factorize(&p2, 1).unwrap();
        assert_eq!(tree_solve(&f, &[3.0]).unwrap(), vec![3.0]);
        assert_eq!(tree_solve(&f, &[0.0]).unwrap(), vec![0.0]);
    }

    #[test]
    fn rejects_cycle_and_bad_rhs() {
        let g = WeightedGraph::new(3, [(0, 1, 1.0), (1, 2, 1.0), (0, 2, 1.0)]).unwrap();
        assert!(matches!(
            tree_factorize(&g, 0),
            Err(SolverError::NotATree(_))
        ));
        let t = WeightedGraph::new(3, [(0, 1, 1.0), (1, 2, 1.0)]).unwrap();
        let f = tree_factorize(&t, 0).unwrap();
        assert!(tree_solve(&f, &[1.0]).is_err());
    }
}
