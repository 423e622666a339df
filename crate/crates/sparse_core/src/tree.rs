use std::cmp::Ordering;
use std::collections::BinaryHeap;

use rand::Rng;

use crate::error::{Result, SparseError};
use crate::graph::{connected_components, WeightedGraph};

/// A spanning tree rooted at `root`, with vertices listed in BFS order.
#[derive(Debug, Clone)]
pub struct RootedTree {
    pub root: usize,
    /// `parent[root] == root`.
    pub parent: Vec<usize>,
    /// Conductance of the edge to the parent (0 at the root).
    pub parent_weight: Vec<f64>,
    /// Index into the tree's edge list of the edge to the parent.
    pub parent_edge: Vec<usize>,
    /// BFS order, root first.
    pub order: Vec<usize>,
    pub depth: Vec<usize>,
}

impl RootedTree {
    pub fn new(tree: &WeightedGraph, root: usize) -> Result<Self> {
        let n = tree.n();
        if root >= n {
            return Err(SparseError::IndexOutOfRange {
                row: root,
                col: root,
                n,
            });
        }
        if tree.m() + 1 != n {
            return Err(SparseError::NotATree(format!(
                "{} vertices but {} edges",
                n,
                tree.m()
            )));
        }
        let adj = tree.adjacency();
        let mut parent = vec![usize::MAX; n];
        let mut parent_weight = vec![0.0; n];
        let mut parent_edge = vec![usize::MAX; n];
        let mut depth = vec![0; n];
        let mut order = Vec::with_capacity(n);
        parent[root] = root;
        order.push(root);
        let mut head = 0;
        while head < order.len() {
            let v = order[head];
            head += 1;
            for (u, w, id) in adj.neighbors(v) {
                if parent[u] == usize::MAX {
                    parent[u] = v;
                    parent_weight[u] = w;
                    parent_edge[u] = id;
                    depth[u] = depth[v] + 1;
                    order.push(u);
                }
            }
        }
        if order.len() != n {
            return Err(SparseError::NotATree("not connected".into()));
        }
        Ok(Self {
            root,
            parent,
            parent_weight,
            parent_edge,
            order,
            depth,
        })
    }

    pub fn n(&self) -> usize {
        self.parent.len()
    }

    /// Sum of edge resistances `1/w` from each vertex up to the root.
    pub fn resistance_to_root(&self) -> Vec<f64> {
        let mut r = vec![0.0; self.n()];
        for &v in &self.order[1..] {
            r[v] = r[self.parent[v]] + 1.0 / self.parent_weight[v];
        }
        r
    }
}

/// Lowest-common-ancestor queries by binary lifting, plus tree path
/// resistances.
#[derive(Debug, Clone)]
pub struct PathOracle {
    up: Vec<Vec<usize>>,
    depth: Vec<usize>,
    resistance: Vec<f64>,
}

impl PathOracle {
    pub fn new(t: &RootedTree) -> Self {
        let n = t.n();
        let mut levels = 1;
        while (1usize << levels) < n.max(2) {
            levels += 1;
        }
        let mut up = vec![t.parent.clone()];
        for k in 1..levels {
            let prev = &up[k - 1];
            let next: Vec<usize> = (0..n).map(|v| prev[prev[v]]).collect();
            up.push(next);
        }
        Self {
            up,
            depth: t.depth.clone(),
            resistance: t.resistance_to_root(),
        }
    }

    pub fn lca(&self, mut a: usize, mut b: usize) -> usize {
        if self.depth[a] < self.depth[b] {
            std::mem::swap(&mut a, &mut b);
        }
        let mut diff = self.depth[a] - self.depth[b];
        let mut k = 0;
        while diff > 0 {
            if diff & 1 == 1 {
                a = self.up[k][a];
            }
            diff >>= 1;
            k += 1;
        }
        if a == b {
            return a;
        }
        for k in (0..self.up.len()).rev() {
            if self.up[k][a] != self.up[k][b] {
                a = self.up[k][a];
                b = self.up[k][b];
            }
        }
        self.up[0][a]
    }

    /// Effective resistance between `a` and `b` in the tree.
    pub fn resistance(&self, a: usize, b: usize) -> f64 {
        let c = self.lca(a, b);
        self.resistance[a] + self.resistance[b] - 2.0 * self.resistance[c]
    }
}

/// Union-find with path halving.
#[derive(Debug, Clone)]
pub struct DisjointSets {
    parent: Vec<usize>,
    size: Vec<usize>,
}

impl DisjointSets {
    pub fn new(n: usize) -> Self {
        Self {
            parent: (0..n).collect(),
            size: vec![1; n],
        }
    }

    pub fn find(&mut self, mut x: usize) -> usize {
        while self.parent[x] != x {
            self.parent[x] = self.parent[self.parent[x]];
            x = self.parent[x];
        }
        x
    }

    /// Returns `false` if `a` and `b` were already joined.
    pub fn union(&mut self, a: usize, b: usize) -> bool {
        let (mut a, mut b) = (self.find(a), self.find(b));
        if a == b {
            return false;
        }
        if self.size[a] < self.size[b] {
            std::mem::swap(&mut a, &mut b);
        }
        self.parent[b] = a;
        self.size[a] += self.size[b];
        true
    }
}

fn require_connected(g: &WeightedGraph) -> Result<()> {
    let c = connected_components(g);
    if c.count > 1 {
        return Err(SparseError::Disconnected {
            components: c.count,
        });
    }
    Ok(())
}

/// Maximum-weight spanning tree (Kruskal), ties broken at random.
pub fn max_weight_spanning_tree<R: Rng + ?Sized>(
    g: &WeightedGraph,
    rng: &mut R,
) -> Result<WeightedGraph> {
    require_connected(g)?;
    let mut order: Vec<(f64, u64, usize)> = g
        .edges()
        .iter()
        .enumerate()
        .map(|(i, e)| (e.w, rng.random::<u64>(), i))
        .collect();
    order.sort_by(|a, b| b.0.total_cmp(&a.0).then(a.1.cmp(&b.1)));
    let mut dsu = DisjointSets::new(g.n());
    let mut kept = Vec::with_capacity(g.n().saturating_sub(1));
    for (_, _, i) in order {
        let e = g.edges()[i];
        if dsu.union(e.u, e.v) {
            kept.push((e.u, e.v, e.w));
        }
    }
    WeightedGraph::new(g.n(), kept)
}

#[derive(PartialEq)]
struct HeapItem(f64, usize);

impl Eq for HeapItem {}

impl PartialOrd for HeapItem {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for HeapItem {
    // Reversed so the max-heap pops the smallest distance first.
    fn cmp(&self, other: &Self) -> Ordering {
        other.0.total_cmp(&self.0).then(other.1.cmp(&self.1))
    }
}

/// Shortest-path tree from `root` with edge lengths `1/w` (resistances).
pub fn shortest_path_tree(g: &WeightedGraph, root: usize) -> Result<WeightedGraph> {
    require_connected(g)?;
    let n = g.n();
    let adj = g.adjacency();
    let mut dist = vec![f64::INFINITY; n];
    let mut via: Vec<Option<(usize, f64)>> = vec![None; n];
    let mut done = vec![false; n];
    let mut heap = BinaryHeap::new();
    dist[root] = 0.0;
    heap.push(HeapItem(0.0, root));
    while let Some(HeapItem(d, v)) = heap.pop() {
        if done[v] {
            continue;
        }
        done[v] = true;
        for (u, w, _) in adj.neighbors(v) {
            let nd = d + 1.0 / w;
            if nd < dist[u] {
                dist[u] = nd;
                via[u] = Some((v, w));
                heap.push(HeapItem(nd, u));
            }
        }
    }
    WeightedGraph::new(
        n,
        via.iter()
            .enumerate()
            .filter_map(|(u, p)| p.map(|(v, w)| (u, v, w))),
    )
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn path_resistances() {
        let t = WeightedGraph::new(4, [(0, 1, 1.0), (1, 2, 0.5), (1, 3, 4.0)]).unwrap();
        let rt = RootedTree::new(&t, 3).unwrap();
        assert_eq!(rt.order[0], 3);
        let po = PathOracle::new(&rt);
        assert_eq!(po.lca(0, 2), 1);
        assert!((po.resistance(0, 2) - 3.0).abs() < 1e-15);
        assert!((po.resistance(2, 3) - 2.25).abs() < 1e-15);
        assert_eq!(po.resistance(2, 2), 0.0);
    }

    #[test]
    fn not_a_tree() {
        let g = WeightedGraph::new(3, [(0, 1, 1.0), (1, 2, 1.0), (0, 2, 1.0)]).unwrap();
        assert!(matches!(
            RootedTree::new(&g, 0),
            Err(SparseError::NotATree(_))
        ));
    }

    #[test]
    fn spanning_trees_span() {
        let g = WeightedGraph::new(
            4,
            [
                (0, 1, 1.0),
                (1, 2, 3.0),
                (2, 3, 1.0),
                (3, 0, 2.0),
                (0, 2, 0.1),
            ],
        )
        .unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let t = max_weight_spanning_tree(&g, &mut rng).unwrap();
        assert!(t.is_tree());
        assert_eq!(t.total_weight(), 6.0);
        let s = shortest_path_tree(&g, 0).unwrap();
        assert!(s.is_tree());
        let disconnected = WeightedGraph::new(3, [(0, 1, 1.0)]).unwrap();
        assert!(shortest_path_tree(&disconnected, 0).is_err());
    }
}
