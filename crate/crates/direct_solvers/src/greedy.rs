use std::collections::{BTreeMap, BTreeSet};

use sparse_core::{graph_of, laplacian_of, SymmetricSparse, WeightedGraph};

use crate::error::Result;

/// One pivot of a partial Cholesky factorization of a Laplacian.
#[derive(Debug, Clone, PartialEq)]
pub struct EliminationStep {
    pub vertex: usize,
    pub pivot: f64,
    /// Neighbours and conductances at the time of elimination.
    pub neighbors: Vec<(usize, f64)>,
}

/// Partial Cholesky factorization `L = P [I 0; L21 I] [D 0; 0 A1] [...]^T P^T`
/// of a Laplacian, with the Schur complement `A1` kept as a graph.
#[derive(Debug, Clone)]
pub struct PartialCholesky {
    n: usize,
    pub steps: Vec<EliminationStep>,
    /// Schur complement on the surviving vertices, relabelled compactly.
    pub remaining: WeightedGraph,
    /// Compact index -> original vertex.
    pub survivors: Vec<usize>,
    /// Original vertex -> compact index (`usize::MAX` if eliminated).
    pub local: Vec<usize>,
    sweep: Sweep,
}

/// The steps flattened for the triangular solves.
#[derive(Debug, Clone, Default)]
struct Sweep {
    vertex: Vec<usize>,
    inv_pivot: Vec<f64>,
    start: Vec<usize>,
    neighbors: Vec<(usize, f64)>,
}

impl Sweep {
    fn new(steps: &[EliminationStep]) -> Self {
        let mut s = Sweep {
            start: vec![0],
            ..Default::default()
        };
        for st in steps {
            s.vertex.push(st.vertex);
            s.inv_pivot.push(1.0 / st.pivot);
            s.neighbors.extend_from_slice(&st.neighbors);
            s.start.push(s.neighbors.len());
        }
        s
    }

    fn nbrs(&self, i: usize) -> &[(usize, f64)] {
        &self.neighbors[self.start[i]..self.start[i + 1]]
    }
}

impl PartialCholesky {
    pub fn n(&self) -> usize {
        self.n
    }

    pub fn pivots(&self) -> Vec<f64> {
        self.steps.iter().map(|s| s.pivot).collect()
    }

    pub fn order(&self) -> Vec<usize> {
        self.steps.iter().map(|s| s.vertex).collect()
    }

    pub fn log_pivot_sum(&self) -> f64 {
        self.steps.iter().map(|s| s.pivot.ln()).sum()
    }

    pub fn remaining_laplacian(&self) -> SymmetricSparse {
        laplacian_of(&self.remaining)
    }

    /// Forward substitution on a full-length right-hand side, grounded at
    /// the surviving vertex `g`.
    pub fn forward(&self, y: &mut [f64], g: usize) {
        let s = &self.sweep;
        for (i, (&v, &ip)) in s.vertex.iter().zip(&s.inv_pivot).enumerate() {
            let yv = y[v] * ip;
            for &(a, w) in s.nbrs(i) {
                y[a] += w * yv;
            }
        }
        y[g] = 0.0;
    }

    /// Back substitution: `x` must hold the solution on the survivors (with
    /// `x[g] = 0`); fills in the eliminated vertices from the forward
    /// result `y`.
    pub fn backward(&self, y: &[f64], x: &mut [f64]) {
        let s = &self.sweep;
        for i in (0..s.vertex.len()).rev() {
            let v = s.vertex[i];
            let mut acc = y[v];
            for &(a, w) in s.nbrs(i) {
                acc += w * x[a];
            }
            x[v] = acc * s.inv_pivot[i];
        }
    }
}

struct Eliminator {
    adj: Vec<BTreeMap<usize, f64>>,
    alive: Vec<bool>,
    alive_count: usize,
    steps: Vec<EliminationStep>,
}

impl Eliminator {
    fn new(g: &WeightedGraph) -> Self {
        let mut adj = vec![BTreeMap::new(); g.n()];
        for e in g.edges() {
            adj[e.u].insert(e.v, e.w);
            adj[e.v].insert(e.u, e.w);
        }
        Self {
            adj,
            alive: vec![true; g.n()],
            alive_count: g.n(),
            steps: Vec::new(),
        }
    }

    /// Schur-complements `v` out; returns its former neighbours.
    fn eliminate(&mut self, v: usize) -> Vec<usize> {
        let nbrs: Vec<(usize, f64)> = std::mem::take(&mut self.adj[v]).into_iter().collect();
        let pivot: f64 = nbrs.iter().map(|p| p.1).sum();
        for &(a, _) in &nbrs {
            self.adj[a].remove(&v);
        }
        for i in 0..nbrs.len() {
            for j in (i + 1)..nbrs.len() {
                let (a, wa) = nbrs[i];
                let (b, wb) = nbrs[j];
                let w = wa * wb / pivot;
                *self.adj[a].entry(b).or_insert(0.0) += w;
                *self.adj[b].entry(a).or_insert(0.0) += w;
            }
        }
        self.alive[v] = false;
        self.alive_count -= 1;
        let touched = nbrs.iter().map(|p| p.0).collect();
        self.steps.push(EliminationStep {
            vertex: v,
            pivot,
            neighbors: nbrs,
        });
        touched
    }

    fn greedy(&mut self) {
        let mut work: BTreeSet<usize> = (0..self.adj.len())
            .filter(|&v| self.adj[v].len() <= 2)
            .collect();
        while self.alive_count > 1 {
            let Some(v) = work.pop_first() else { break };
            if !self.alive[v] || self.adj[v].len() > 2 || self.adj[v].is_empty() {
                continue;
            }
            for a in self.eliminate(v) {
                if self.adj[a].len() <= 2 {
                    work.insert(a);
                }
            }
        }
    }

    fn finish(self, n: usize) -> PartialCholesky {
        let survivors: Vec<usize> = (0..n).filter(|&v| self.alive[v]).collect();
        let mut local = vec![usize::MAX; n];
        for (i, &v) in survivors.iter().enumerate() {
            local[v] = i;
        }
        let mut edges = Vec::new();
        for &v in &survivors {
            for (&u, &w) in &self.adj[v] {
                if v < u {
                    edges.push((local[v], local[u], w));
                }
            }
        }
        PartialCholesky {
            n,
            sweep: Sweep::new(&self.steps),
            steps: self.steps,
            remaining: WeightedGraph::new(survivors.len(), edges).expect("Schur complement"),
            survivors,
            local,
        }
    }
}

/// Eliminates degree-1 and degree-2 vertices until every remaining vertex
/// has at least three neighbours or at most one vertex is left.
pub fn greedy_eliminate(l: &SymmetricSparse) -> Result<PartialCholesky> {
    Ok(greedy_eliminate_graph(&graph_of(l)?))
}

pub fn greedy_eliminate_graph(g: &WeightedGraph) -> PartialCholesky {
    let mut e = Eliminator::new(g);
    e.greedy();
    e.finish(g.n())
}

/// Greedy elimination followed by up to `forced` rounds of eliminating one
/// minimum-degree vertex (with fill) and resuming greedy elimination.
pub fn eliminate_with_fallback(g: &WeightedGraph, forced: usize) -> PartialCholesky {
    let mut e = Eliminator::new(g);
    e.greedy();
    for _ in 0..forced {
        if e.alive_count <= 1 {
            break;
        }
        let v = (0..g.n())
            .filter(|&v| e.alive[v])
            .min_by_key(|&v| (e.adj[v].len(), v))
            .expect("a live vertex");
        e.eliminate(v);
        e.greedy();
    }
    e.finish(g.n())
}
