use std::collections::VecDeque;

use sparse_core::seed::{stream, tag};
use sparse_core::tree::{max_weight_spanning_tree, shortest_path_tree};
use sparse_core::{PathOracle, RootedTree, WeightedGraph};
use stretch::{tree_stretch_exact, StretchReport};

use crate::error::{require_connected, Result};

/// Consecutive rejected swaps after which local improvement stops.
pub const MAX_FUTILE_SWAPS: usize = 32;

fn hop_bfs(g: &WeightedGraph, src: usize) -> Vec<usize> {
    let adj = g.adjacency();
    let mut dist = vec![usize::MAX; g.n()];
    let mut queue = VecDeque::from([src]);
    dist[src] = 0;
    while let Some(v) = queue.pop_front() {
        for (u, _, _) in adj.neighbors(v) {
            if dist[u] == usize::MAX {
                dist[u] = dist[v] + 1;
                queue.push_back(u);
            }
        }
    }
    dist
}

/// Breadth-first tree by hop count from `root`, preferring heavier edges
/// among equal-depth parents.
fn hop_tree(g: &WeightedGraph, root: usize) -> Result<WeightedGraph> {
    let depth = hop_bfs(g, root);
    let adj = g.adjacency();
    let mut edges = Vec::with_capacity(g.n().saturating_sub(1));
    for v in (0..g.n()).filter(|&v| v != root) {
        let best = adj
            .neighbors(v)
            .filter(|&(u, _, _)| depth[u] + 1 == depth[v])
            .max_by(|a, b| a.1.total_cmp(&b.1).then(b.0.cmp(&a.0)))
            .expect("BFS parent");
        edges.push((v, best.0, best.1));
    }
    Ok(WeightedGraph::new(g.n(), edges)?)
}

/// Midpoint of a double-sweep BFS diameter path.
fn central_vertex(g: &WeightedGraph) -> usize {
    let far = |d: &[usize]| (0..d.len()).max_by_key(|&v| (d[v], v)).unwrap();
    let a = far(&hop_bfs(g, 0));
    let da = hop_bfs(g, a);
    let b = far(&da);
    let db = hop_bfs(g, b);
    let half = da[b] / 2;
    (0..g.n())
        .filter(|&v| da[v] + db[v] == da[b])
        .min_by_key(|&v| (da[v].abs_diff(half), v))
        .unwrap()
}

fn canonical(u: usize, v: usize) -> (usize, usize) {
    (u.min(v), u.max(v))
}

/// One pass of load bookkeeping for the current tree: the weight of
/// off-tree edges crossing each vertex's parent edge.
fn crossing_weights(
    g: &WeightedGraph,
    rooted: &RootedTree,
    paths: &PathOracle,
    in_tree: &std::collections::HashSet<(usize, usize)>,
) -> Vec<f64> {
    let mut acc = vec![0.0; g.n()];
    for e in g.edges() {
        if in_tree.contains(&canonical(e.u, e.v)) {
            continue;
        }
        acc[e.u] += e.w;
        acc[e.v] += e.w;
        acc[paths.lca(e.u, e.v)] -= 2.0 * e.w;
    }
    for &v in rooted.order.iter().skip(1).rev() {
        acc[rooted.parent[v]] += acc[v];
    }
    acc
}

/// Tries swapping high-stretch off-tree edges into the tree in place of
/// the most loaded tree edge on their cycle, keeping swaps that lower the
/// total stretch.
fn improve(
    g: &WeightedGraph,
    mut tree: WeightedGraph,
    mut report: StretchReport,
) -> Result<(WeightedGraph, StretchReport)> {
    let mut attempts = 0;
    let mut futile = 0;
    'outer: while attempts < g.m() && futile < MAX_FUTILE_SWAPS {
        let rooted = RootedTree::new(&tree, 0)?;
        let paths = PathOracle::new(&rooted);
        let in_tree: std::collections::HashSet<_> =
            tree.edges().iter().map(|e| canonical(e.u, e.v)).collect();
        let cross = crossing_weights(g, &rooted, &paths, &in_tree);
        let per_edge = report.per_edge.as_ref().expect("exact tree stretch");
        let mut candidates: Vec<usize> = (0..g.m())
            .filter(|&i| !in_tree.contains(&canonical(g.edges()[i].u, g.edges()[i].v)))
            .collect();
        candidates.sort_by(|&a, &b| per_edge[b].total_cmp(&per_edge[a]).then(a.cmp(&b)));
        for i in candidates {
            if attempts >= g.m() || futile >= MAX_FUTILE_SWAPS {
                break 'outer;
            }
            attempts += 1;
            let e = g.edges()[i];
            let top = paths.lca(e.u, e.v);
            let mut worst = None;
            let mut best_load = f64::NEG_INFINITY;
            for start in [e.u, e.v] {
                let mut x = start;
                while x != top {
                    let load = cross[x] / rooted.parent_weight[x];
                    if load > best_load {
                        best_load = load;
                        worst = Some(x);
                    }
                    x = rooted.parent[x];
                }
            }
            let Some(x) = worst else { continue };
            let drop = rooted.parent_edge[x];
            let swapped = WeightedGraph::new(
                g.n(),
                tree.edges()
                    .iter()
                    .enumerate()
                    .filter(|&(j, _)| j != drop)
                    .map(|(_, f)| (f.u, f.v, f.w))
                    .chain([(e.u, e.v, e.w)]),
            )?;
            let candidate = tree_stretch_exact(g, &swapped)?;
            if candidate.value < report.value * (1.0 - 1e-12) {
                tree = swapped;
                report = candidate;
                futile = 0;
                continue 'outer;
            }
            futile += 1;
        }
        break;
    }
    Ok((tree, report))
}

/// Spanning subtree of `g` with small total stretch, and its exact
/// stretch.
///
/// Three starting trees (maximum-weight with random ties, shortest-path and
/// breadth-first from a central vertex) are each improved by local swaps;
/// the one with the least stretch wins.
pub fn low_stretch_tree(g: &WeightedGraph, seed: u64) -> Result<(WeightedGraph, StretchReport)> {
    require_connected(g)?;
    if g.is_tree() || g.n() <= 1 {
        let report = tree_stretch_exact(g, g)?;
        return Ok((g.clone(), report));
    }
    let mut rng = stream(seed, &[tag("low-stretch-tree")]);
    let center = central_vertex(g);
    let mut best: Option<(WeightedGraph, StretchReport)> = None;
    for start in [
        max_weight_spanning_tree(g, &mut rng)?,
        shortest_path_tree(g, center)?,
        hop_tree(g, center)?,
    ] {
        let report = tree_stretch_exact(g, &start)?;
        let (tree, report) = improve(g, start, report)?;
        if best.as_ref().is_none_or(|b| report.value < b.1.value) {
            best = Some((tree, report));
        }
    }
    Ok(best.expect("at least one candidate"))
}
