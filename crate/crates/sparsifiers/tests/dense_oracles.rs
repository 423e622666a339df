use direct_solvers::PinnedSolve;
use nalgebra::DMatrix;
use proptest::prelude::*;
use rand::Rng;
use sparse_core::WeightedGraph;
use sparsifiers::*;

fn triangle() -> WeightedGraph {
    WeightedGraph::new(3, [(0, 1, 1.0), (1, 2, 1.0), (0, 2, 1.0)]).unwrap()
}

fn is_subgraph(t: &WeightedGraph, g: &WeightedGraph) -> bool {
    t.edges()
        .iter()
        .all(|e| g.edges().iter().any(|f| (f.u, f.v, f.w) == (e.u, e.v, e.w)))
}

/// Condition number of the pencil `(L_B, L_G)` on the complement of the
/// constant vector.
fn pencil_condition(b: &WeightedGraph, g: &WeightedGraph) -> f64 {
    let n = g.n();
    let lb = oracles::ground(&oracles::dense_laplacian(b), n - 1);
    let lg = oracles::ground(&oracles::dense_laplacian(g), n - 1);
    let ev = oracles::pencil_eigenvalues(&lb, &lg);
    ev[n - 2] / ev[0]
}

fn pencil_range(b: &WeightedGraph, g: &WeightedGraph) -> (f64, f64) {
    let n = g.n();
    let lb = oracles::ground(&oracles::dense_laplacian(b), n - 1);
    let lg = oracles::ground(&oracles::dense_laplacian(g), n - 1);
    let ev = oracles::pencil_eigenvalues(&lb, &lg);
    (ev[0], ev[n - 2])
}

fn min_eig(m: &DMatrix<f64>) -> f64 {
    oracles::eigenvalues(m)[0]
}

#[test]
fn tree_input_is_its_own_low_stretch_tree() {
    let mut rng = oracles::rng(1);
    let t = oracles::random_connected_graph(40, 0, 0.5, 2.0, &mut rng);
    let (tree, st) = low_stretch_tree(&t, 3).unwrap();
    assert_eq!(tree, t);
    assert!((st.value - 39.0).abs() < 1e-10);
}

#[test]
fn triangle_tree_is_a_path() {
    let (tree, st) = low_stretch_tree(&triangle(), 0).unwrap();
    assert_eq!(tree.m(), 2);
    assert!(tree.is_tree());
    assert_eq!(st.value, 4.0);
}

#[test]
fn grid_tree_stretch_is_certified() {
    let g = oracles::grid(10, 10);
    let (tree, st) = low_stretch_tree(&g, 5).unwrap();
    assert!(tree.is_tree() && is_subgraph(&tree, &g));
    let lt = oracles::dense_laplacian(&tree);
    let lg = oracles::dense_laplacian(&g);
    assert!(min_eig(&(&lt * st.value - &lg)) >= -1e-6);
    assert!(min_eig(&(&lg - &lt)) >= -1e-8);
    assert_eq!(
        st.value,
        stretch::tree_stretch_exact(&g, &tree).unwrap().value
    );
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(30))]

    #[test]
    fn subgraph_ordering_for_random_trees(seed in 0u64..10_000, n in 3usize..90) {
        let mut rng = oracles::rng(seed);
        let g = oracles::random_connected_graph(n, 2 * n, 0.1, 4.0, &mut rng);
        let (tree, st) = low_stretch_tree(&g, seed).unwrap();
        prop_assert!(tree.is_tree() && is_subgraph(&tree, &g));
        let gap = oracles::dense_laplacian(&g) - oracles::dense_laplacian(&tree);
        prop_assert!(min_eig(&gap) >= -1e-8);
        prop_assert!(st.value >= (n - 1) as f64 - 1e-9);
        // Tree plus sampled edges at unit scale is still a subgraph.
        let parts = tree_plus_sampled_edges(&g, &tree, &st, n / 4, &mut rng).unwrap();
        let tree_pairs: Vec<(usize, usize)> = tree.edges().iter().map(|e| (e.u, e.v)).collect();
        let unscaled = WeightedGraph::new(
            n,
            parts.graph.edges().iter().map(|e| {
                let w = if tree_pairs.contains(&(e.u, e.v)) { e.w / parts.scale } else { e.w };
                (e.u, e.v, w)
            }),
        )
        .unwrap();
        let gap = oracles::dense_laplacian(&g) - oracles::dense_laplacian(&unscaled);
        prop_assert!(min_eig(&gap) >= -1e-8);
    }
}

#[test]
fn complete_graph_sparsifier_quality() {
    let mut e = Vec::new();
    for i in 0..20 {
        for j in (i + 1)..20 {
            e.push((i, j, 1.0));
        }
    }
    let k20 = WeightedGraph::new(20, e).unwrap();
    let eps = 0.5;
    let q = sample_count(20, eps);
    let good = (0..50u64)
        .filter(|&s| {
            let h = spectral_sparsify(&k20, eps, s).unwrap();
            assert!(h.m() <= q);
            let (lo, hi) = pencil_range(&h, &k20);
            lo >= 1.0 - eps - 0.1 && hi <= 1.0 + eps + 0.1
        })
        .count();
    assert!(good >= 45, "{good}/50");
}

#[test]
fn tree_sparsifier_spans() {
    let mut rng = oracles::rng(2);
    let t = oracles::random_connected_graph(30, 0, 0.5, 2.0, &mut rng);
    let good = (0..50u64)
        .filter(|&s| {
            let h = spectral_sparsify(&t, 0.5, s).unwrap();
            assert!(h.is_connected());
            let (lo, hi) = pencil_range(&h, &t);
            lo >= 0.4 && hi <= 1.6
        })
        .count();
    assert!(good >= 45, "{good}/50");
    let single = WeightedGraph::new(2, [(0, 1, 3.0)]).unwrap();
    assert_eq!(spectral_sparsify(&single, 0.5, 0).unwrap(), single);
    assert!(spectral_sparsify(&single, 1.0, 0).is_err());
}

#[test]
fn sparsifier_edge_count_bound() {
    let mut rng = oracles::rng(6);
    for s in 0..10 {
        let n = rng.random_range(5..60);
        let g = oracles::random_connected_graph(n, 3 * n, 0.1, 4.0, &mut rng);
        let eps = rng.random_range(0.2..0.9);
        let h = spectral_sparsify(&g, eps, s).unwrap();
        assert!((h.m() as f64) <= 9.0 * n as f64 * (n as f64).ln() / (eps * eps));
    }
}

#[test]
fn incremental_without_samples_is_scaled_tree() {
    let g = oracles::grid(6, 6);
    let inc = incremental_sparsify_with_samples(&g, 0, 4).unwrap();
    assert_eq!(inc.parts.graph, inc.tree);
    assert_eq!(inc.parts.scale, 1.0);
    assert!((inc.kappa - inc.lambda * inc.parts.scale).abs() < 1e-12);
    // The measured factor bounds the true one, within the safety margin.
    let exact = pencil_condition(&inc.tree, &g);
    assert!(inc.kappa >= exact && inc.kappa <= 2.0 * exact * 1.0001);
}

#[test]
fn incremental_triangle_with_one_sample() {
    let g = triangle();
    let tree_only = incremental_sparsify_with_samples(&g, 0, 0).unwrap();
    let k_tree = pencil_condition(&tree_only.graph, &g);
    for s in 0..10 {
        let inc = incremental_sparsify_with_samples(&g, 1, s).unwrap();
        assert!(pencil_condition(&inc.graph, &g) <= k_tree + 1e-9);
    }
}

#[test]
fn incremental_grid_meets_soft_target() {
    let g = oracles::grid(8, 8);
    let mut ok = 0;
    for s in 0..20u64 {
        let inc = incremental_sparsify(&g, 16.0, s).unwrap();
        let (lo, hi) = pencil_range(&inc.graph, &g);
        // Normalized so that G <= B <= kappa G.
        assert!(lo >= 1.0 - 1e-9, "lambda underestimated: {lo}");
        assert!(hi <= inc.kappa * (1.0 + 1e-9));
        if hi / lo <= 32.0 {
            ok += 1;
        }
    }
    assert!(ok >= 16, "{ok}/20");
}

#[test]
fn chain_of_a_tree_has_one_level() {
    let mut rng = oracles::rng(3);
    let t = oracles::random_connected_graph(300, 0, 0.5, 2.0, &mut rng);
    let c = build_chain(&t, 1).unwrap();
    assert_eq!(c.depth(), 1);
    assert_eq!(c.levels[0].precond, t);
    assert_eq!(c.levels[0].next_dim(), 1);
    assert_eq!(c.levels[0].kappa, 1.0);
    assert_eq!(c.base.n(), 1);
    let exact = oracles::logdet(&oracles::ground(&oracles::dense_laplacian(&t), 299));
    assert!((c.deterministic_log_tau() - exact).abs() < 1e-8 * exact.abs());
}

#[test]
fn small_graph_has_no_levels() {
    let g = oracles::grid(8, 8);
    let c = build_chain(&g, 1).unwrap();
    assert_eq!(c.depth(), 0);
    assert_eq!(c.base, g);
    let exact = oracles::logdet(&oracles::ground(&oracles::dense_laplacian(&g), 63));
    assert!((c.deterministic_log_tau() - exact).abs() < 1e-9 * exact);
}

#[test]
fn large_grid_chain_shrinks() {
    let g = oracles::grid(40, 40);
    let c = build_chain(&g, 2).unwrap();
    assert!(c.depth() >= 1 && c.depth() <= chain_cap(1600));
    let mut dim = 1600;
    for (i, l) in c.levels.iter().enumerate() {
        assert!(l.connected);
        assert_eq!(l.dim(), dim);
        assert!(l.next_dim() < l.dim());
        assert!(i == 0 || l.dim() < c.levels[i - 1].dim());
        dim = l.next_dim();
    }
    assert_eq!(c.base.n(), dim);
    assert!(dim < BASE_DIM && !c.capped);
    let json = serde_json::to_string(&c.summary()).unwrap();
    let back: ChainSummary = serde_json::from_str(&json).unwrap();
    assert_eq!(back, c.summary());
}

/// Dense `ln det` of `F_A` minus `ln det` of `lambda F_{B0}`, both grounded
/// at the level's ground.
fn dense_remainder(l: &ChainLevel) -> f64 {
    let g = l.ground;
    let fa = oracles::ground(&oracles::dense_laplacian(&l.graph), g);
    let fb = oracles::ground(&oracles::dense_laplacian(&l.precond), g) * l.lambda;
    oracles::logdet(&fa) - oracles::logdet(&fb)
}

#[test]
fn chain_telescopes_to_the_top_determinant() {
    let mut rng = oracles::rng(12);
    let graphs = [
        oracles::grid(15, 15),
        oracles::random_connected_graph(300, 200, 0.2, 3.0, &mut rng),
        oracles::random_connected_graph(250, 40, 0.2, 3.0, &mut rng),
    ];
    for g in &graphs {
        let c = build_chain(g, 7).unwrap();
        assert!(c.depth() >= 1);
        let rem: f64 = c.levels.iter().map(dense_remainder).sum();
        let exact = oracles::logdet(&oracles::ground(&oracles::dense_laplacian(g), g.n() - 1));
        let total = c.deterministic_log_tau() + rem;
        assert!(
            (total - exact).abs() < 1e-7 * exact.abs(),
            "{total} vs {exact}"
        );
        // Normalization: A <= B <= kappa A on every level.
        for l in &c.levels {
            let (lo, hi) = pencil_range(&l.precond.scaled(l.lambda), &l.graph);
            assert!(
                lo >= 1.0 - 1e-9 && hi <= l.kappa * (1.0 + 1e-9),
                "{lo} {hi} {}",
                l.kappa
            );
        }
    }
}

#[test]
fn chain_solver_matches_dense_solve() {
    let g = oracles::grid(15, 15);
    let c = build_chain(&g, 3).unwrap();
    let l = &c.levels[0];
    let solver = ChainSolver::new(&c, 0, 1e-10);
    let mut rng = oracles::rng(0);
    let b: Vec<f64> = (0..225).map(|_| rng.random_range(-1.0..1.0)).collect();
    for ground in [l.ground, 0, 100] {
        let mut x = vec![0.0; 225];
        solver.solve_pinned(&b, ground, &mut x);
        let fb = oracles::ground(&oracles::dense_laplacian(&l.precond), ground);
        let want = fb
            .cholesky()
            .unwrap()
            .solve(&nalgebra::DVector::from_column_slice(&reduction::restrict(
                &b, ground,
            )));
        let got = reduction::restrict(&x, ground);
        for (a, w) in got.iter().zip(want.iter()) {
            assert!((a - w).abs() <= 1e-8 * want.amax());
        }
    }
}

#[test]
fn two_level_chain_solver_residual() {
    let g = oracles::grid(60, 60);
    let c = build_chain(&g, 3).unwrap();
    assert!(c.depth() >= 2, "{:?}", c.summary());
    let l = &c.levels[0];
    let nu = 1e-8;
    let solver = ChainSolver::new(&c, 0, nu);
    let mut rng = oracles::rng(0);
    let n = g.n();
    let b: Vec<f64> = (0..n).map(|_| rng.random_range(-1.0..1.0)).collect();
    let mut x = vec![0.0; n];
    solver.solve_pinned(&b, l.ground, &mut x);
    let fb = reduction::grounded_laplacian(&l.precond, l.ground);
    let xr = reduction::restrict(&x, l.ground);
    let br = reduction::restrict(&b, l.ground);
    let r: Vec<f64> = fb
        .matvec(&xr)
        .unwrap()
        .iter()
        .zip(&br)
        .map(|(a, b)| a - b)
        .collect();
    let rel = sparse_core::ops::norm2(&r) / sparse_core::ops::norm2(&br);
    assert!(rel < 1e-4, "relative residual {rel}");
    assert_eq!(c.failures(), 0);
}
