//! Reduction of SDD matrices to graph Laplacians, and grounding of
//! Laplacians into positive definite matrices.
//!
//! For `A = D1 + D2 + A_p + A_n` (`A_p` the positive off-diagonal part,
//! `A_n` the negative one, `D1` the absolute off-diagonal row sums and
//! `D2 >= 0` the remaining diagonal slack) the two Laplacians
//!
//! ```text
//! L_hat   = D1 + A_n - A_p
//! L_tilde = [ D1 + D2/2 + A_n    -D2/2 - A_p      ]
//!           [ -D2/2 - A_p         D1 + D2/2 + A_n ]
//! ```
//!
//! satisfy `log det A = pld(L_tilde) - pld(L_hat)`.

use sparse_core::{
    connected_components, graph_of, laplacian_of, SparseError, SymmetricSparse, WeightedGraph,
};
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ReductionError {
    #[error("matrix is not SDD: row {row} has slack {slack:e}")]
    NotSdd { row: usize, slack: f64 },
    #[error("graph is disconnected ({components} components)")]
    DisconnectedGraph { components: usize },
    #[error("ground vertex {ground} out of range for dimension {n}")]
    BadGround { ground: usize, n: usize },
    #[error(transparent)]
    Sparse(#[from] SparseError),
}

pub type Result<T> = std::result::Result<T, ReductionError>;

/// The two Laplacians of the reduction together with the splitting of `A`.
#[derive(Debug, Clone)]
pub struct KelnerPair {
    /// `2n x 2n` Laplacian.
    pub l_tilde: SymmetricSparse,
    /// `n x n` Laplacian.
    pub l_hat: SymmetricSparse,
    pub g_tilde: WeightedGraph,
    pub g_hat: WeightedGraph,
    pub d1: Vec<f64>,
    pub d2: Vec<f64>,
    /// Strictly positive off-diagonal part of `A`.
    pub a_p: SymmetricSparse,
    /// Strictly negative off-diagonal part of `A`.
    pub a_n: SymmetricSparse,
}

impl KelnerPair {
    pub fn n(&self) -> usize {
        self.l_hat.n()
    }

    /// `D1 + D2 + A_p + A_n` as a fresh matrix.
    pub fn reassemble(&self) -> SymmetricSparse {
        let mut t: Vec<(usize, usize, f64)> = Vec::new();
        for i in 0..self.n() {
            t.push((i, i, self.d1[i]));
            t.push((i, i, self.d2[i]));
        }
        t.extend_from_slice(self.a_p.entries());
        t.extend_from_slice(self.a_n.entries());
        SymmetricSparse::from_triplets(self.n(), &t).expect("parts are consistent")
    }
}

/// Relative tolerance on SDD slack, so that matrices assembled in floating
/// point as "Laplacian plus nonnegative diagonal" are accepted.
const SLACK_TOL: f64 = 1e-12;

pub fn kelner_reduce(a: &SymmetricSparse) -> Result<KelnerPair> {
    let n = a.n();
    let mut d1 = vec![0.0; n];
    let mut diag = vec![0.0; n];
    let mut pos = Vec::new();
    let mut neg = Vec::new();
    for &(r, c, v) in a.entries() {
        if r == c {
            diag[r] = v;
            continue;
        }
        d1[r] += v.abs();
        d1[c] += v.abs();
        if v > 0.0 {
            pos.push((r, c, v));
        } else {
            neg.push((r, c, v));
        }
    }
    let mut d2 = vec![0.0; n];
    for i in 0..n {
        let slack = diag[i] - d1[i];
        if slack < -SLACK_TOL * diag[i].abs().max(d1[i]) || slack.is_nan() {
            return Err(ReductionError::NotSdd { row: i, slack });
        }
        d2[i] = slack.max(0.0);
    }

    let mut hat = Vec::with_capacity(pos.len() + neg.len());
    let mut tilde = Vec::with_capacity(2 * (pos.len() + neg.len()) + n);
    for &(r, c, v) in &neg {
        hat.push((r, c, -v));
        tilde.push((r, c, -v));
        tilde.push((n + r, n + c, -v));
    }
    for &(r, c, v) in &pos {
        hat.push((r, c, v));
        tilde.push((r, n + c, v));
        tilde.push((c, n + r, v));
    }
    for (i, &s) in d2.iter().enumerate() {
        if s > 0.0 {
            tilde.push((i, n + i, 0.5 * s));
        }
    }
    let g_hat = WeightedGraph::new(n, hat)?;
    let g_tilde = WeightedGraph::new(2 * n, tilde)?;
    Ok(KelnerPair {
        l_tilde: laplacian_of(&g_tilde),
        l_hat: laplacian_of(&g_hat),
        g_tilde,
        g_hat,
        d1,
        d2,
        a_p: SymmetricSparse::from_triplets(n, &pos)?,
        a_n: SymmetricSparse::from_triplets(n, &neg)?,
    })
}

/// A Laplacian with one row and column removed.
#[derive(Debug, Clone)]
pub struct GroundedMatrix {
    pub f: SymmetricSparse,
    pub ground: usize,
    pub parent_n: usize,
}

impl GroundedMatrix {
    /// Grounded coordinates -> full coordinates (zero at the ground).
    pub fn lift(&self, x: &[f64]) -> Vec<f64> {
        lift(x, self.ground)
    }

    /// Full coordinates -> grounded coordinates.
    pub fn restrict(&self, x: &[f64]) -> Vec<f64> {
        restrict(x, self.ground)
    }
}

pub fn lift(x: &[f64], ground: usize) -> Vec<f64> {
    let mut y = Vec::with_capacity(x.len() + 1);
    y.extend_from_slice(&x[..ground]);
    y.push(0.0);
    y.extend_from_slice(&x[ground..]);
    y
}

pub fn restrict(x: &[f64], ground: usize) -> Vec<f64> {
    let mut y = Vec::with_capacity(x.len() - 1);
    y.extend_from_slice(&x[..ground]);
    y.extend_from_slice(&x[ground + 1..]);
    y
}

/// Validating grounding of a Laplacian matrix.
pub fn float_laplacian(l: &SymmetricSparse, ground: usize) -> Result<GroundedMatrix> {
    let g = graph_of(l)?;
    float_graph(&g, ground)
}

/// Grounded Laplacian of a connected graph.
pub fn float_graph(g: &WeightedGraph, ground: usize) -> Result<GroundedMatrix> {
    if ground >= g.n() {
        return Err(ReductionError::BadGround { ground, n: g.n() });
    }
    let comps = connected_components(g);
    if comps.count > 1 {
        return Err(ReductionError::DisconnectedGraph {
            components: comps.count,
        });
    }
    Ok(GroundedMatrix {
        f: grounded_laplacian(g, ground),
        ground,
        parent_n: g.n(),
    })
}

/// Laplacian of `g` with row and column `ground` deleted (no validation).
pub fn grounded_laplacian(g: &WeightedGraph, ground: usize) -> SymmetricSparse {
    let idx = |v: usize| if v < ground { v } else { v - 1 };
    let deg = g.degrees();
    let mut t: Vec<(usize, usize, f64)> = Vec::with_capacity(g.n() + g.m());
    for (v, &d) in deg.iter().enumerate() {
        if v != ground && d != 0.0 {
            t.push((idx(v), idx(v), d));
        }
    }
    for e in g.edges() {
        if e.u != ground && e.v != ground {
            t.push((idx(e.u), idx(e.v), -e.w));
        }
    }
    t.sort_by(|a, b| (a.0, a.1).cmp(&(b.0, b.1)));
    SymmetricSparse::from_canonical(g.n() - 1, t)
}

/// `pld(L) = ln n + log det F_L` for a connected Laplacian.
pub fn pld_of_laplacian(l: &SymmetricSparse, logdet_f: f64) -> f64 {
    pld_from_grounded(l.n(), logdet_f)
}

pub fn pld_from_grounded(n: usize, logdet_f: f64) -> f64 {
    (n as f64).ln() + logdet_f
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn two_by_two_positive_offdiagonal() {
        let a =
            SymmetricSparse::from_triplets(2, &[(0, 0, 2.0), (0, 1, 1.0), (1, 1, 2.0)]).unwrap();
        let k = kelner_reduce(&a).unwrap();
        assert_eq!(k.l_hat.to_dense(), vec![1.0, -1.0, -1.0, 1.0]);
        assert_eq!(k.d1, vec![1.0, 1.0]);
        assert_eq!(k.d2, vec![1.0, 1.0]);
        assert_eq!(k.reassemble(), a);
        // 4-cycle 0-2-1-3 with alternating weights 1/2 and 1.
        assert_eq!(k.l_tilde.get(0, 2), -0.5);
        assert_eq!(k.l_tilde.get(0, 3), -1.0);
        assert_eq!(k.l_tilde.get(1, 2), -1.0);
        assert_eq!(k.l_tilde.get(0, 1), 0.0);
        assert_eq!(k.l_tilde.diagonal(), vec![1.5; 4]);
    }

    #[test]
    fn no_positive_offdiagonals() {
        let a = SymmetricSparse::from_triplets(
            3,
            &[
                (0, 0, 3.0),
                (0, 1, -1.0),
                (1, 1, 2.0),
                (1, 2, -1.0),
                (2, 2, 1.5),
            ],
        )
        .unwrap();
        let k = kelner_reduce(&a).unwrap();
        assert_eq!(k.a_p.nnz_upper(), 0);
        // L_hat = D1 + A_n.
        let mut t = vec![(0, 0, 1.0), (1, 1, 2.0), (2, 2, 1.0)];
        t.extend_from_slice(k.a_n.entries());
        assert_eq!(k.l_hat, SymmetricSparse::from_triplets(3, &t).unwrap());
    }

    #[test]
    fn scaled_identity() {
        let a = SymmetricSparse::from_diagonal(&[2.0; 3]);
        let k = kelner_reduce(&a).unwrap();
        assert_eq!(k.d1, vec![0.0; 3]);
        assert_eq!(k.d2, vec![2.0; 3]);
        assert_eq!(k.l_hat.nnz_upper(), 0);
        let mut expect = vec![0.0; 36];
        for i in 0..3 {
            expect[i * 6 + i] = 1.0;
            expect[(i + 3) * 6 + i + 3] = 1.0;
            expect[i * 6 + i + 3] = -1.0;
            expect[(i + 3) * 6 + i] = -1.0;
        }
        assert_eq!(k.l_tilde.to_dense(), expect);
    }

    #[test]
    fn rejects_non_sdd() {
        let a =
            SymmetricSparse::from_triplets(2, &[(0, 0, 1.0), (0, 1, -2.0), (1, 1, 1.0)]).unwrap();
        assert!(matches!(
            kelner_reduce(&a),
            Err(ReductionError::NotSdd { row: 0, .. })
        ));
    }

    fn path(n: usize) -> WeightedGraph {
        WeightedGraph::new(n, (0..n - 1).map(|i| (i, i + 1, 1.0))).unwrap()
    }

    #[test]
    fn float_examples() {
        let f = float_laplacian(&laplacian_of(&path(2)), 1).unwrap();
        assert_eq!(f.f.to_dense(), vec![1.0]);
        let f = float_laplacian(&laplacian_of(&path(3)), 2).unwrap();
        assert_eq!(f.f.to_dense(), vec![1.0, -1.0, -1.0, 2.0]);
        let tri = WeightedGraph::new(3, [(0, 1, 1.0), (1, 2, 1.0), (0, 2, 1.0)]).unwrap();
        let f = float_laplacian(&laplacian_of(&tri), 2).unwrap();
        assert_eq!(f.f.to_dense(), vec![2.0, -1.0, -1.0, 2.0]);
        // Grounding a middle vertex re-indexes the rest.
        let f = float_graph(&path(3), 1).unwrap();
        assert_eq!(f.f.to_dense(), vec![1.0, 0.0, 0.0, 1.0]);
        assert_eq!(f.lift(&[4.0, 5.0]), vec![4.0, 0.0, 5.0]);
        assert_eq!(f.restrict(&[4.0, 0.0, 5.0]), vec![4.0, 5.0]);
    }

    #[test]
    fn float_errors() {
        let two_edges = WeightedGraph::new(4, [(0, 1, 1.0), (2, 3, 1.0)]).unwrap();
        assert!(matches!(
            float_laplacian(&laplacian_of(&two_edges), 3),
            Err(ReductionError::DisconnectedGraph { components: 2 })
        ));
        let not_lap =
            SymmetricSparse::from_triplets(2, &[(0, 0, 1.0), (0, 1, 1.0), (1, 1, 1.0)]).unwrap();
        assert!(matches!(
            float_laplacian(&not_lap, 1),
            Err(ReductionError::Sparse(SparseError::NotALaplacian(_)))
        ));
    }

    #[test]
    fn pld_examples() {
        assert!((pld_of_laplacian(&laplacian_of(&path(3)), 0.0) - 3f64.ln()).abs() < 1e-15);
        assert!((pld_of_laplacian(&laplacian_of(&path(2)), 0.0) - 2f64.ln()).abs() < 1e-15);
    }
}
