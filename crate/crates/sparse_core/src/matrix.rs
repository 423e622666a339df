use crate::error::{Result, SparseError};
use crate::ops::LinearOperator;

/// Immutable symmetric sparse matrix.
///
/// Only the upper triangle is stored canonically (sorted by row, then
/// column); a full symmetric CSR copy is kept alongside for products.
#[derive(Debug, Clone, PartialEq)]
pub struct SymmetricSparse {
    n: usize,
    upper: Vec<(usize, usize, f64)>,
    row_ptr: Vec<usize>,
    col_idx: Vec<usize>,
    values: Vec<f64>,
}

impl SymmetricSparse {
    /// Builds a matrix from `(row, col, value)` triplets.
    ///
    /// Repeated triplets are summed. If a pair is given in both halves,
    /// the two half-sums must agree exactly, and they are then summed as
    /// well. Entries that sum to exactly zero are dropped.
    pub fn from_triplets(n: usize, triplets: &[(usize, usize, f64)]) -> Result<Self> {
        let mut keyed = Vec::with_capacity(triplets.len());
        for &(r, c, v) in triplets {
            if r >= n || c >= n {
                return Err(SparseError::IndexOutOfRange { row: r, col: c, n });
            }
            let lower = r > c;
            keyed.push((r.min(c), r.max(c), lower, v));
        }
        keyed.sort_by(|a, b| (a.0, a.1, a.2).cmp(&(b.0, b.1, b.2)));

        let mut upper = Vec::with_capacity(keyed.len());
        let mut i = 0;
        while i < keyed.len() {
            let (r, c) = (keyed[i].0, keyed[i].1);
            let mut up: Option<f64> = None;
            let mut lo: Option<f64> = None;
            while i < keyed.len() && keyed[i].0 == r && keyed[i].1 == c {
                let slot = if keyed[i].2 { &mut lo } else { &mut up };
                *slot = Some(slot.unwrap_or(0.0) + keyed[i].3);
                i += 1;
            }
            if let (Some(u), Some(l)) = (up, lo) {
                if u != l {
                    return Err(SparseError::AsymmetricInput {
                        row: r,
                        col: c,
                        upper: u,
                        lower: l,
                    });
                }
            }
            let v = up.unwrap_or(0.0) + lo.unwrap_or(0.0);
            if v != 0.0 {
                upper.push((r, c, v));
            }
        }
        Ok(Self::from_canonical(n, upper))
    }

    /// Builds from an already canonical upper triangle (sorted, unique,
    /// `row <= col`, in range). Checked only in debug builds.
    pub fn from_canonical(n: usize, upper: Vec<(usize, usize, f64)>) -> Self {
        debug_assert!(upper
            .windows(2)
            .all(|w| (w[0].0, w[0].1) < (w[1].0, w[1].1)));
        debug_assert!(upper.iter().all(|&(r, c, _)| r <= c && c < n));

        let mut count = vec![0usize; n];
        for &(r, c, _) in &upper {
            count[r] += 1;
            if r != c {
                count[c] += 1;
            }
        }
        let mut row_ptr = vec![0usize; n + 1];
        for i in 0..n {
            row_ptr[i + 1] = row_ptr[i] + count[i];
        }
        let nnz = row_ptr[n];
        let mut col_idx = vec![0usize; nnz];
        let mut values = vec![0.0; nnz];
        let mut cursor = row_ptr[..n].to_vec();
        // Iterating the sorted upper triangle fills every CSR row in
        // increasing column order.
        for &(r, c, v) in &upper {
            col_idx[cursor[r]] = c;
            values[cursor[r]] = v;
            cursor[r] += 1;
            if r != c {
                col_idx[cursor[c]] = r;
                values[cursor[c]] = v;
                cursor[c] += 1;
            }
        }
        Self {
            n,
            upper,
            row_ptr,
            col_idx,
            values,
        }
    }

    pub fn identity(n: usize) -> Self {
        Self::from_diagonal(&vec![1.0; n])
    }

    pub fn from_diagonal(d: &[f64]) -> Self {
        let upper = d
            .iter()
            .enumerate()
            .filter(|(_, &v)| v != 0.0)
            .map(|(i, &v)| (i, i, v))
            .collect();
        Self::from_canonical(d.len(), upper)
    }

    pub fn n(&self) -> usize {
        self.n
    }

    /// Canonical upper-triangle entries.
    pub fn entries(&self) -> &[(usize, usize, f64)] {
        &self.upper
    }

    pub fn nnz_upper(&self) -> usize {
        self.upper.len()
    }

    /// Number of stored off-diagonal pairs.
    pub fn off_diagonal_count(&self) -> usize {
        self.upper.iter().filter(|e| e.0 != e.1).count()
    }

    /// Column indices and values of row `i` in increasing column order.
    pub fn row(&self, i: usize) -> (&[usize], &[f64]) {
        let (a, b) = (self.row_ptr[i], self.row_ptr[i + 1]);
        (&self.col_idx[a..b], &self.values[a..b])
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        let (cols, vals) = self.row(i);
        match cols.binary_search(&j) {
            Ok(k) => vals[k],
            Err(_) => 0.0,
        }
    }

    pub fn diagonal(&self) -> Vec<f64> {
        (0..self.n).map(|i| self.get(i, i)).collect()
    }

    pub fn max_abs(&self) -> f64 {
        self.upper.iter().fold(0.0, |m, e| m.max(e.2.abs()))
    }

    /// `y = A x`, checking dimensions.
    pub fn matvec(&self, x: &[f64]) -> Result<Vec<f64>> {
        if x.len() != self.n {
            return Err(SparseError::DimensionMismatch {
                expected: self.n,
                got: x.len(),
            });
        }
        let mut y = vec![0.0; self.n];
        self.apply(x, &mut y);
        Ok(y)
    }

    /// Row-major dense copy.
    pub fn to_dense(&self) -> Vec<f64> {
        let n = self.n;
        let mut d = vec![0.0; n * n];
        for &(r, c, v) in &self.upper {
            d[r * n + c] = v;
            d[c * n + r] = v;
        }
        d
    }

    pub fn scaled(&self, alpha: f64) -> Self {
        let upper = self
            .upper
            .iter()
            .map(|&(r, c, v)| (r, c, alpha * v))
            .filter(|e| e.2 != 0.0)
            .collect();
        Self::from_canonical(self.n, upper)
    }

    /// Per-row SDD slack `A_ii - sum_{j != i} |A_ij|`.
    pub fn sdd_slack(&self) -> Vec<f64> {
        (0..self.n)
            .map(|i| {
                let (cols, vals) = self.row(i);
                let mut diag = 0.0;
                let mut off = 0.0;
                for (&c, &v) in cols.iter().zip(vals) {
                    if c == i {
                        diag = v;
                    } else {
                        off += v.abs();
                    }
                }
                diag - off
            })
            .collect()
    }
}

/// SDD membership test: `(all rows satisfy A_ii >= sum |A_ij|, slacks)`.
pub fn is_sdd(a: &SymmetricSparse) -> (bool, Vec<f64>) {
    let slack = a.sdd_slack();
    (slack.iter().all(|&s| s >= 0.0), slack)
}

/// `y = A x` with symmetric completion.
pub fn matvec(a: &SymmetricSparse, x: &[f64]) -> Result<Vec<f64>> {
    a.matvec(x)
}

impl LinearOperator for SymmetricSparse {
    fn dim(&self) -> usize {
        self.n
    }

    fn apply(&self, x: &[f64], y: &mut [f64]) {
        let x = &x[..self.n];
        for (yi, w) in y[..self.n].iter_mut().zip(self.row_ptr.windows(2)) {
            let (cols, vals) = (&self.col_idx[w[0]..w[1]], &self.values[w[0]..w[1]]);
            let mut s = 0.0;
            for (&c, &v) in cols.iter().zip(vals) {
                s += v * x[c];
            }
            *yi = s;
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn single_entry() {
        let a = SymmetricSparse::from_triplets(2, &[(0, 0, 1.0)]).unwrap();
        assert_eq!(a.to_dense(), vec![1.0, 0.0, 0.0, 0.0]);
    }

    #[test]
    fn two_by_two() {
        let a =
            SymmetricSparse::from_triplets(2, &[(0, 0, 2.0), (0, 1, -1.0), (1, 1, 2.0)]).unwrap();
        assert_eq!(a.to_dense(), vec![2.0, -1.0, -1.0, 2.0]);
        assert_eq!(a.matvec(&[1.0, 1.0]).unwrap(), vec![1.0, 1.0]);
    }

    #[test]
    fn mirrored_duplicates_are_summed() {
        let a = SymmetricSparse::from_triplets(
            3,
            &[(0, 1, -1.0), (1, 0, -1.0), (2, 2, 1.0), (0, 0, 3.0)],
        )
        .unwrap();
        assert_eq!(a.get(0, 1), -2.0);
        assert_eq!(a.get(1, 0), -2.0);
        assert_eq!(a.entries(), &[(0, 0, 3.0), (0, 1, -2.0), (2, 2, 1.0)]);
    }

    #[test]
    fn asymmetric_rejected() {
        let e = SymmetricSparse::from_triplets(2, &[(0, 1, -1.0), (1, 0, -2.0)]).unwrap_err();
        assert!(matches!(e, SparseError::AsymmetricInput { .. }));
    }

    #[test]
    fn out_of_range_rejected() {
        let e = SymmetricSparse::from_triplets(2, &[(0, 2, 1.0)]).unwrap_err();
        assert!(matches!(e, SparseError::IndexOutOfRange { .. }));
    }

    #[test]
    fn sdd_examples() {
        let a =
            SymmetricSparse::from_triplets(2, &[(0, 0, 2.0), (0, 1, -1.0), (1, 1, 2.0)]).unwrap();
        assert_eq!(is_sdd(&a), (true, vec![1.0, 1.0]));
        let b =
            SymmetricSparse::from_triplets(2, &[(0, 0, 1.0), (0, 1, -2.0), (1, 1, 1.0)]).unwrap();
        assert!(!is_sdd(&b).0);
    }

    #[test]
    fn matvec_dimension_mismatch() {
        let a = SymmetricSparse::identity(3);
        assert!(matches!(
            a.matvec(&[1.0, 2.0]),
            Err(SparseError::DimensionMismatch {
                expected: 3,
                got: 2
            })
        ));
        assert_eq!(a.matvec(&[1.0, 2.0, 3.0]).unwrap(), vec![1.0, 2.0, 3.0]);
    }
}
