use crate::error::{Result, SparseError};
use crate::matrix::SymmetricSparse;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Edge {
    pub u: usize,
    pub v: usize,
    pub w: f64,
}

impl Edge {
    pub fn other(&self, x: usize) -> usize {
        if x == self.u {
            self.v
        } else {
            self.u
        }
    }
}

/// Undirected graph with positive edge weights (conductances).
///
/// Edges are canonical: `u < v`, sorted, and parallel edges merged by
/// summing their weights.
#[derive(Debug, Clone, PartialEq)]
pub struct WeightedGraph {
    n: usize,
    edges: Vec<Edge>,
}

impl WeightedGraph {
    pub fn new(n: usize, edges: impl IntoIterator<Item = (usize, usize, f64)>) -> Result<Self> {
        let mut list = Vec::new();
        for (u, v, w) in edges {
            if u >= n || v >= n {
                return Err(SparseError::IndexOutOfRange { row: u, col: v, n });
            }
            if u == v {
                return Err(SparseError::InvalidEdge {
                    u,
                    v,
                    w,
                    reason: "self-loop",
                });
            }
            if !(w > 0.0 && w.is_finite()) {
                return Err(SparseError::InvalidEdge {
                    u,
                    v,
                    w,
                    reason: "weight must be positive and finite",
                });
            }
            list.push(Edge {
                u: u.min(v),
                v: u.max(v),
                w,
            });
        }
        list.sort_by(|a, b| (a.u, a.v).cmp(&(b.u, b.v)));
        let mut merged: Vec<Edge> = Vec::with_capacity(list.len());
        for e in list {
            match merged.last_mut() {
                Some(last) if last.u == e.u && last.v == e.v => last.w += e.w,
                _ => merged.push(e),
            }
        }
        Ok(Self { n, edges: merged })
    }

    pub fn empty(n: usize) -> Self {
        Self {
            n,
            edges: Vec::new(),
        }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn m(&self) -> usize {
        self.edges.len()
    }

    pub fn edges(&self) -> &[Edge] {
        &self.edges
    }

    pub fn total_weight(&self) -> f64 {
        self.edges.iter().map(|e| e.w).sum()
    }

    pub fn scaled(&self, alpha: f64) -> Self {
        assert!(alpha > 0.0 && alpha.is_finite());
        Self {
            n: self.n,
            edges: self
                .edges
                .iter()
                .map(|e| Edge {
                    w: e.w * alpha,
                    ..*e
                })
                .collect(),
        }
    }

    pub fn adjacency(&self) -> Adjacency {
        Adjacency::new(self)
    }

    pub fn is_connected(&self) -> bool {
        connected_components(self).count <= 1
    }

    pub fn is_tree(&self) -> bool {
        self.n >= 1 && self.m() + 1 == self.n && self.is_connected()
    }

    /// Weighted degrees.
    pub fn degrees(&self) -> Vec<f64> {
        let mut d = vec![0.0; self.n];
        for e in &self.edges {
            d[e.u] += e.w;
            d[e.v] += e.w;
        }
        d
    }

    /// Subgraph induced on `vertices`, relabelled `0..vertices.len()` in the
    /// given order.
    pub fn induced(&self, vertices: &[usize]) -> WeightedGraph {
        let mut local = vec![usize::MAX; self.n];
        for (i, &v) in vertices.iter().enumerate() {
            local[v] = i;
        }
        let edges = self
            .edges
            .iter()
            .filter(|e| local[e.u] != usize::MAX && local[e.v] != usize::MAX)
            .map(|e| (local[e.u], local[e.v], e.w));
        WeightedGraph::new(vertices.len(), edges).expect("induced subgraph of a valid graph")
    }

    /// Union of two graphs on the same vertex set (weights added).
    pub fn union(&self, other: &WeightedGraph) -> Result<WeightedGraph> {
        if self.n != other.n {
            return Err(SparseError::DimensionMismatch {
                expected: self.n,
                got: other.n,
            });
        }
        WeightedGraph::new(
            self.n,
            self.edges
                .iter()
                .chain(other.edges.iter())
                .map(|e| (e.u, e.v, e.w)),
        )
    }
}

/// Compressed adjacency lists; neighbours of each vertex are sorted.
#[derive(Debug, Clone)]
pub struct Adjacency {
    offsets: Vec<usize>,
    nbrs: Vec<usize>,
    weights: Vec<f64>,
    edge_ids: Vec<usize>,
}

impl Adjacency {
    pub fn new(g: &WeightedGraph) -> Self {
        let n = g.n();
        let mut count = vec![0usize; n + 1];
        for e in g.edges() {
            count[e.u + 1] += 1;
            count[e.v + 1] += 1;
        }
        for i in 0..n {
            count[i + 1] += count[i];
        }
        let offsets = count;
        let total = offsets[n];
        let mut nbrs = vec![0; total];
        let mut weights = vec![0.0; total];
        let mut edge_ids = vec![0; total];
        let mut cursor = offsets[..n].to_vec();
        for (id, e) in g.edges().iter().enumerate() {
            for (a, b) in [(e.u, e.v), (e.v, e.u)] {
                nbrs[cursor[a]] = b;
                weights[cursor[a]] = e.w;
                edge_ids[cursor[a]] = id;
                cursor[a] += 1;
            }
        }
        // Edges are sorted by (u, v), so lists need one more pass to be
        // sorted by neighbour for both endpoints.
        for v in 0..n {
            let (a, b) = (offsets[v], offsets[v + 1]);
            let mut idx: Vec<usize> = (a..b).collect();
            idx.sort_by_key(|&k| nbrs[k]);
            let nb: Vec<usize> = idx.iter().map(|&k| nbrs[k]).collect();
            let wt: Vec<f64> = idx.iter().map(|&k| weights[k]).collect();
            let id: Vec<usize> = idx.iter().map(|&k| edge_ids[k]).collect();
            nbrs[a..b].copy_from_slice(&nb);
            weights[a..b].copy_from_slice(&wt);
            edge_ids[a..b].copy_from_slice(&id);
        }
        Self {
            offsets,
            nbrs,
            weights,
            edge_ids,
        }
    }

    pub fn n(&self) -> usize {
        self.offsets.len() - 1
    }

    pub fn degree(&self, v: usize) -> usize {
        self.offsets[v + 1] - self.offsets[v]
    }

    /// `(neighbour, weight, edge id)` triples for vertex `v`.
    pub fn neighbors(&self, v: usize) -> impl Iterator<Item = (usize, f64, usize)> + '_ {
        let (a, b) = (self.offsets[v], self.offsets[v + 1]);
        (a..b).map(move |k| (self.nbrs[k], self.weights[k], self.edge_ids[k]))
    }
}

/// Graph Laplacian `L = D - W`.
pub fn laplacian_of(g: &WeightedGraph) -> SymmetricSparse {
    let deg = g.degrees();
    let mut upper: Vec<(usize, usize, f64)> = Vec::with_capacity(g.n() + g.m());
    let mut k = 0;
    let edges = g.edges();
    for (i, &d) in deg.iter().enumerate() {
        if d != 0.0 {
            upper.push((i, i, d));
        }
        while k < edges.len() && edges[k].u == i {
            upper.push((i, edges[k].v, -edges[k].w));
            k += 1;
        }
    }
    SymmetricSparse::from_canonical(g.n(), upper)
}

/// Inverse of [`laplacian_of`]: validates the Laplacian structure and
/// returns the weighted graph. Row sums must vanish to within
/// `1e-9 * max|L_ij|`.
pub fn graph_of(l: &SymmetricSparse) -> Result<WeightedGraph> {
    let tol = 1e-9 * l.max_abs();
    for i in 0..l.n() {
        let (cols, vals) = l.row(i);
        let mut sum = 0.0;
        for (&c, &v) in cols.iter().zip(vals) {
            if c != i && v > 0.0 {
                return Err(SparseError::NotALaplacian(format!(
                    "positive off-diagonal entry {v} at ({i}, {c})"
                )));
            }
            if c == i && v < 0.0 {
                return Err(SparseError::NotALaplacian(format!(
                    "negative diagonal entry {v} at row {i}"
                )));
            }
            sum += v;
        }
        if sum.abs() > tol {
            return Err(SparseError::NotALaplacian(format!(
                "row {i} sums to {sum:e}"
            )));
        }
    }
    WeightedGraph::new(
        l.n(),
        l.entries()
            .iter()
            .filter(|e| e.0 != e.1)
            .map(|&(r, c, v)| (r, c, -v)),
    )
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Components {
    /// Component label per vertex, numbered by smallest member vertex.
    pub labels: Vec<usize>,
    pub count: usize,
}

/// Connected components by breadth-first search.
pub fn connected_components(g: &WeightedGraph) -> Components {
    let adj = g.adjacency();
    let n = g.n();
    let mut labels = vec![usize::MAX; n];
    let mut count = 0;
    let mut queue = Vec::new();
    for s in 0..n {
        if labels[s] != usize::MAX {
            continue;
        }
        labels[s] = count;
        queue.clear();
        queue.push(s);
        let mut head = 0;
        while head < queue.len() {
            let v = queue[head];
            head += 1;
            for (u, _, _) in adj.neighbors(v) {
                if labels[u] == usize::MAX {
                    labels[u] = count;
                    queue.push(u);
                }
            }
        }
        count += 1;
    }
    Components { labels, count }
}

/// A connected piece of a graph together with its original vertex ids.
#[derive(Debug, Clone)]
pub struct Component {
    pub vertices: Vec<usize>,
    pub graph: WeightedGraph,
}

/// Splits a graph into its connected components (vertices in increasing
/// order inside each component).
pub fn split_components(g: &WeightedGraph) -> Vec<Component> {
    let comps = connected_components(g);
    let mut members = vec![Vec::new(); comps.count];
    for (v, &c) in comps.labels.iter().enumerate() {
        members[c].push(v);
    }
    members
        .into_iter()
        .map(|vertices| Component {
            graph: g.induced(&vertices),
            vertices,
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn triangle() -> WeightedGraph {
        WeightedGraph::new(3, [(0, 1, 1.0), (1, 2, 1.0), (0, 2, 1.0)]).unwrap()
    }

    #[test]
    fn path2_laplacian() {
        let g = WeightedGraph::new(2, [(0, 1, 1.0)]).unwrap();
        assert_eq!(laplacian_of(&g).to_dense(), vec![1.0, -1.0, -1.0, 1.0]);
    }

    #[test]
    fn triangle_laplacian() {
        let l = laplacian_of(&triangle());
        for i in 0..3 {
            for j in 0..3 {
                assert_eq!(l.get(i, j), if i == j { 2.0 } else { -1.0 });
            }
        }
        assert_eq!(graph_of(&l).unwrap(), triangle());
    }

    #[test]
    fn row_sum_violation() {
        let l = SymmetricSparse::from_triplets(2, &[(0, 0, 1.0), (0, 1, -1.0), (1, 1, 1.0 + 1e-3)])
            .unwrap();
        assert!(matches!(graph_of(&l), Err(SparseError::NotALaplacian(_))));
    }

    #[test]
    fn parallel_edges_merge() {
        let g = WeightedGraph::new(2, [(0, 1, 1.0), (1, 0, 2.5)]).unwrap();
        assert_eq!(g.edges(), &[Edge { u: 0, v: 1, w: 3.5 }]);
    }

    #[test]
    fn invalid_edges() {
        assert!(WeightedGraph::new(2, [(0, 0, 1.0)]).is_err());
        assert!(WeightedGraph::new(2, [(0, 1, 0.0)]).is_err());
        assert!(WeightedGraph::new(2, [(0, 1, f64::NAN)]).is_err());
        assert!(WeightedGraph::new(2, [(0, 2, 1.0)]).is_err());
    }

    #[test]
    fn components() {
        assert_eq!(connected_components(&triangle()).count, 1);
        let g = WeightedGraph::new(4, [(0, 1, 1.0), (2, 3, 1.0)]).unwrap();
        let c = connected_components(&g);
        assert_eq!(c.count, 2);
        assert_eq!(c.labels, vec![0, 0, 1, 1]);
        let parts = split_components(&g);
        assert_eq!(parts[1].vertices, vec![2, 3]);
        assert_eq!(parts[1].graph.edges(), &[Edge { u: 0, v: 1, w: 1.0 }]);
    }

    #[test]
    fn adjacency_sorted() {
        let g = WeightedGraph::new(4, [(2, 3, 1.0), (0, 3, 2.0), (1, 3, 3.0)]).unwrap();
        let adj = g.adjacency();
        let nb: Vec<usize> = adj.neighbors(3).map(|t| t.0).collect();
        assert_eq!(nb, vec![0, 1, 2]);
        assert_eq!(adj.degree(3), 3);
    }
}
