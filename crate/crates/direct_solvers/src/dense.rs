use sparse_core::{SymmetricSparse, WeightedGraph};

use crate::error::{Result, SolverError};
use crate::reground;

/// Dense Cholesky factor `A = L L^T`, `L` stored row-major.
#[derive(Debug, Clone)]
pub struct DenseCholesky {
    n: usize,
    l: Vec<f64>,
    /// `L^T` row-major, for the backward sweep.
    lt: Vec<f64>,
}

impl DenseCholesky {
    /// Factors a row-major `n x n` symmetric matrix (only the lower
    /// triangle is read).
    pub fn factor(n: usize, mut a: Vec<f64>) -> Result<Self> {
        assert_eq!(a.len(), n * n);
        for j in 0..n {
            let mut d = a[j * n + j];
            for k in 0..j {
                d -= a[j * n + k] * a[j * n + k];
            }
            if !(d > 0.0) {
                return Err(SolverError::NotPositiveDefinite { index: j, pivot: d });
            }
            let d = d.sqrt();
            a[j * n + j] = d;
            for i in (j + 1)..n {
                let (row_i, row_j) = (i * n, j * n);
                let mut s = a[row_i + j];
                for k in 0..j {
                    s -= a[row_i + k] * a[row_j + k];
                }
                a[row_i + j] = s / d;
            }
        }
        let mut lt = vec![0.0; n * n];
        for i in 0..n {
            for j in (i + 1)..n {
                a[i * n + j] = 0.0;
            }
            for j in 0..=i {
                lt[j * n + i] = a[i * n + j];
            }
        }
        Ok(Self { n, l: a, lt })
    }

    pub fn from_sparse(a: &SymmetricSparse) -> Result<Self> {
        Self::factor(a.n(), a.to_dense())
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn logdet(&self) -> f64 {
        (0..self.n).map(|i| 2.0 * self.l[i * self.n + i].ln()).sum()
    }

    /// Pivots `D_ii` of the equivalent `L D L^T` factorization.
    pub fn pivots(&self) -> Vec<f64> {
        (0..self.n)
            .map(|i| self.l[i * self.n + i] * self.l[i * self.n + i])
            .collect()
    }

    pub fn solve_in_place(&self, x: &mut [f64]) {
        let n = self.n;
        for i in 0..n {
            let row = &self.l[i * n..i * n + i];
            let s: f64 = row.iter().zip(&x[..i]).map(|(a, b)| a * b).sum();
            x[i] = (x[i] - s) / self.l[i * n + i];
        }
        for i in (0..n).rev() {
            let row = &self.lt[i * n + i + 1..(i + 1) * n];
            let s: f64 = row.iter().zip(&x[i + 1..]).map(|(a, b)| a * b).sum();
            x[i] = (x[i] - s) / self.lt[i * n + i];
        }
    }
}

/// `ln det A` by dense Cholesky.
pub fn dense_logdet(a: &SymmetricSparse) -> Result<f64> {
    Ok(DenseCholesky::from_sparse(a)?.logdet())
}

/// Dense factorization of a connected graph's Laplacian grounded at
/// `ground`.
#[derive(Debug, Clone)]
pub struct GroundedDense {
    n: usize,
    ground: usize,
    chol: DenseCholesky,
}

impl GroundedDense {
    pub fn new(g: &WeightedGraph, ground: usize) -> Result<Self> {
        let n = g.n();
        let m = n - 1;
        let idx = |v: usize| if v < ground { v } else { v - 1 };
        let mut d = vec![0.0; m * m];
        for e in g.edges() {
            for (a, b) in [(e.u, e.v), (e.v, e.u)] {
                if a != ground {
                    d[idx(a) * m + idx(a)] += e.w;
                    if b != ground {
                        d[idx(a) * m + idx(b)] -= e.w;
                    }
                }
            }
        }
        Ok(Self {
            n,
            ground,
            chol: DenseCholesky::factor(m, d)?,
        })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn ground(&self) -> usize {
        self.ground
    }

    /// `log det F` (the log weighted spanning-tree count).
    pub fn logdet(&self) -> f64 {
        self.chol.logdet()
    }

    /// Full-length pinned solve at any ground `g`.
    pub fn solve_pinned(&self, b: &[f64], g: usize, x: &mut [f64]) {
        reground(b, g, self.ground, x, |rhs, out| {
            let mut y: Vec<f64> = rhs
                .iter()
                .enumerate()
                .filter(|&(i, _)| i != self.ground)
                .map(|(_, &v)| v)
                .collect();
            self.chol.solve_in_place(&mut y);
            let mut k = 0;
            for (i, o) in out.iter_mut().enumerate() {
                if i == self.ground {
                    *o = 0.0;
                } else {
                    *o = y[k];
                    k += 1;
                }
            }
        });
    }
}
