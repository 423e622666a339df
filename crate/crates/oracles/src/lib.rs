//! Dense reference computations (via nalgebra) and random test instances.
//!
//! Nothing here shares code with the library crates beyond the container
//! types, so the dense results serve as independent oracles.

use nalgebra::{DMatrix, DVector, SymmetricEigen};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use sparse_core::{laplacian_of, SymmetricSparse, WeightedGraph};

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn dense(a: &SymmetricSparse) -> DMatrix<f64> {
    DMatrix::from_row_slice(a.n(), a.n(), &a.to_dense())
}

pub fn dense_laplacian(g: &WeightedGraph) -> DMatrix<f64> {
    dense(&laplacian_of(g))
}

pub fn eigenvalues(m: &DMatrix<f64>) -> Vec<f64> {
    let mut v: Vec<f64> = SymmetricEigen::new(m.clone())
        .eigenvalues
        .iter()
        .copied()
        .collect();
    v.sort_by(|a, b| a.total_cmp(b));
    v
}

/// Sum of logs of the positive eigenvalues, treating anything below
/// `1e-9 * lambda_max` as zero.
pub fn pld(m: &DMatrix<f64>) -> f64 {
    let ev = eigenvalues(m);
    let top = ev.iter().fold(0.0f64, |a, &b| a.max(b.abs()));
    ev.iter().filter(|&&l| l > 1e-9 * top).map(|l| l.ln()).sum()
}

pub fn graph_pld(g: &WeightedGraph) -> f64 {
    pld(&dense_laplacian(g))
}

/// `ln det` of a symmetric positive definite matrix via eigenvalues.
pub fn logdet(m: &DMatrix<f64>) -> f64 {
    let ev = eigenvalues(m);
    assert!(ev[0] > 0.0, "matrix is not positive definite: {}", ev[0]);
    ev.iter().map(|l| l.ln()).sum()
}

/// `ln |det|` of a symmetric matrix via eigenvalues.
pub fn log_abs_det(m: &DMatrix<f64>) -> f64 {
    eigenvalues(m).iter().map(|l| l.abs().ln()).sum()
}

/// Moore-Penrose pseudo-inverse of a symmetric matrix.
pub fn pinv(m: &DMatrix<f64>) -> DMatrix<f64> {
    let e = SymmetricEigen::new(m.clone());
    let top = e.eigenvalues.iter().fold(0.0f64, |a, &b| a.max(b.abs()));
    let inv = DVector::from_iterator(
        e.eigenvalues.len(),
        e.eigenvalues
            .iter()
            .map(|&l| if l.abs() > 1e-10 * top { 1.0 / l } else { 0.0 }),
    );
    &e.eigenvectors * DMatrix::from_diagonal(&inv) * e.eigenvectors.transpose()
}

/// Symmetric square root and inverse square root of an SPD matrix.
pub fn sqrt_and_inv_sqrt(m: &DMatrix<f64>) -> (DMatrix<f64>, DMatrix<f64>) {
    let e = SymmetricEigen::new(m.clone());
    let s = DVector::from_iterator(e.eigenvalues.len(), e.eigenvalues.iter().map(|l| l.sqrt()));
    let si = s.map(|x| 1.0 / x);
    let q = &e.eigenvectors;
    (
        q * DMatrix::from_diagonal(&s) * q.transpose(),
        q * DMatrix::from_diagonal(&si) * q.transpose(),
    )
}

/// Generalized eigenvalues of the pencil `(a, b)` for SPD `b`, ascending.
pub fn pencil_eigenvalues(a: &DMatrix<f64>, b: &DMatrix<f64>) -> Vec<f64> {
    let (_, bi) = sqrt_and_inv_sqrt(b);
    let m = &bi * a * &bi;
    eigenvalues(&((&m + m.transpose()) * 0.5))
}

/// Drops row and column `g`.
pub fn ground(m: &DMatrix<f64>, g: usize) -> DMatrix<f64> {
    m.clone().remove_row(g).remove_column(g)
}

/// Random connected graph: a random spanning tree plus about `extra`
/// additional edges, weights uniform in `[lo, hi]`.
pub fn random_connected_graph<R: Rng>(
    n: usize,
    extra: usize,
    lo: f64,
    hi: f64,
    rng: &mut R,
) -> WeightedGraph {
    let mut e = Vec::new();
    let mut perm: Vec<usize> = (0..n).collect();
    for i in (1..n).rev() {
        let j = rng.random_range(0..=i);
        perm.swap(i, j);
    }
    for i in 1..n {
        let j = rng.random_range(0..i);
        e.push((perm[i], perm[j], rng.random_range(lo..=hi)));
    }
    for _ in 0..extra {
        let u = rng.random_range(0..n);
        let v = rng.random_range(0..n);
        if u != v {
            e.push((u, v, rng.random_range(lo..=hi)));
        }
    }
    WeightedGraph::new(n, e).unwrap()
}

/// A random spanning tree of `g`, drawn by Kruskal on random priorities.
pub fn random_spanning_tree<R: Rng>(g: &WeightedGraph, rng: &mut R) -> WeightedGraph {
    let mut order: Vec<(u64, usize)> = (0..g.m()).map(|i| (rng.random(), i)).collect();
    order.sort();
    let mut parent: Vec<usize> = (0..g.n()).collect();
    fn find(p: &mut [usize], mut x: usize) -> usize {
        while p[x] != x {
            p[x] = p[p[x]];
            x = p[x];
        }
        x
    }
    let mut kept = Vec::new();
    for (_, i) in order {
        let e = g.edges()[i];
        let (a, b) = (find(&mut parent, e.u), find(&mut parent, e.v));
        if a != b {
            parent[a] = b;
            kept.push((e.u, e.v, e.w));
        }
    }
    WeightedGraph::new(g.n(), kept).unwrap()
}

/// Random invertible SDD matrix with off-diagonals of both signs.
///
/// Roughly a third of the rows have zero slack; the rest get a strictly
/// positive slack, and every connected block receives at least one strict
/// row, which makes the matrix nonsingular.
pub fn random_sdd<R: Rng>(n: usize, density: f64, rng: &mut R) -> SymmetricSparse {
    let mut t = Vec::new();
    let mut off = vec![0.0; n];
    let mut block: Vec<usize> = (0..n).collect();
    fn find(p: &mut [usize], mut x: usize) -> usize {
        while p[x] != x {
            p[x] = p[p[x]];
            x = p[x];
        }
        x
    }
    for i in 0..n {
        for j in (i + 1)..n {
            if rng.random::<f64>() < density {
                let mag = rng.random_range(0.1..2.0);
                let v = if rng.random::<bool>() { mag } else { -mag };
                t.push((i, j, v));
                off[i] += mag;
                off[j] += mag;
                let (a, b) = (find(&mut block, i), find(&mut block, j));
                block[a] = b;
            }
        }
    }
    let mut strict = vec![false; n];
    let mut slack = vec![0.0; n];
    for i in 0..n {
        if rng.random::<f64>() > 0.35 {
            slack[i] = rng.random_range(0.05..1.0);
            strict[find(&mut block, i)] = true;
        }
    }
    for i in 0..n {
        let r = find(&mut block, i);
        if !strict[r] {
            slack[i] = rng.random_range(0.05..1.0);
            strict[r] = true;
        }
        t.push((i, i, off[i] + slack[i]));
    }
    SymmetricSparse::from_triplets(n, &t).unwrap()
}

/// Unit-weight `w x h` grid graph, vertex `r * w + c`.
pub fn grid(w: usize, h: usize) -> WeightedGraph {
    let mut e = Vec::new();
    for r in 0..h {
        for c in 0..w {
            let v = r * w + c;
            if c + 1 < w {
                e.push((v, v + 1, 1.0));
            }
            if r + 1 < h {
                e.push((v, v + w, 1.0));
            }
        }
    }
    WeightedGraph::new(w * h, e).unwrap()
}

/// Laplacian of `g` plus `shift * I`.
pub fn shifted_laplacian(g: &WeightedGraph, shift: f64) -> SymmetricSparse {
    let mut t: Vec<(usize, usize, f64)> = laplacian_of(g).entries().to_vec();
    for i in 0..g.n() {
        t.push((i, i, shift));
    }
    SymmetricSparse::from_triplets(g.n(), &t).unwrap()
}
