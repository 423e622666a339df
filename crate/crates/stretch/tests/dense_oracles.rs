use nalgebra::{DMatrix, DVector};
use proptest::prelude::*;
use rand::Rng;
use sparse_core::WeightedGraph;
use stretch::*;

fn path3() -> WeightedGraph {
    WeightedGraph::new(3, [(0, 1, 1.0), (1, 2, 1.0)]).unwrap()
}

fn triangle() -> WeightedGraph {
    WeightedGraph::new(3, [(0, 1, 1.0), (1, 2, 1.0), (0, 2, 1.0)]).unwrap()
}

fn dense_trace_identity(g: &WeightedGraph, h: &WeightedGraph) -> f64 {
    (oracles::pinv(&oracles::dense_laplacian(h)) * oracles::dense_laplacian(g)).trace()
}

fn with_extra_edges(g: &WeightedGraph, extra: usize, rng: &mut impl Rng) -> WeightedGraph {
    let mut e: Vec<(usize, usize, f64)> = g.edges().iter().map(|e| (e.u, e.v, e.w)).collect();
    for _ in 0..extra {
        let (u, v) = (rng.random_range(0..g.n()), rng.random_range(0..g.n()));
        if u != v {
            e.push((u, v, rng.random_range(0.1..2.0)));
        }
    }
    WeightedGraph::new(g.n(), e).unwrap()
}

#[test]
fn tree_stretch_examples() {
    let st = tree_stretch_exact(&path3(), &path3()).unwrap();
    assert_eq!(st.value, 2.0);
    let st = tree_stretch_exact(&triangle(), &path3()).unwrap();
    let mut per = st.per_edge.clone().unwrap();
    per.sort_by(f64::total_cmp);
    assert_eq!(per, vec![1.0, 1.0, 2.0]);
    assert_eq!(st.value, 4.0);
    let g = WeightedGraph::new(3, [(0, 1, 1.0), (1, 2, 1.0), (0, 2, 2.0)]).unwrap();
    let st = tree_stretch_exact(&g, &path3()).unwrap();
    assert_eq!(st.per_edge.unwrap()[1], 4.0);
}

#[test]
fn tree_stretch_errors() {
    assert!(matches!(
        tree_stretch_exact(&triangle(), &triangle()),
        Err(StretchError::NotATree(_))
    ));
    let small = WeightedGraph::new(2, [(0, 1, 1.0)]).unwrap();
    assert!(matches!(
        tree_stretch_exact(&triangle(), &small),
        Err(StretchError::VertexMismatch { .. })
    ));
    let split = WeightedGraph::new(3, [(0, 1, 1.0)]).unwrap();
    assert!(matches!(
        generalized_stretch_exact(&triangle(), &split),
        Err(StretchError::Disconnected { components: 2 })
    ));
}

#[test]
fn generalized_stretch_examples() {
    let st = generalized_stretch_exact(&triangle(), &path3()).unwrap();
    assert!((st.value - 4.0).abs() < 1e-12);
    let mut rng = oracles::rng(4);
    for _ in 0..10 {
        let n = rng.random_range(2..60);
        let g = oracles::random_connected_graph(n, 2 * n, 0.1, 5.0, &mut rng);
        let st = generalized_stretch_exact(&g, &g).unwrap();
        assert!((st.value - (n - 1) as f64).abs() < 1e-8);
        let h = oracles::random_connected_graph(n, n, 0.1, 5.0, &mut rng);
        let base = generalized_stretch_exact(&g, &h).unwrap().value;
        let scaled = generalized_stretch_exact(&g.scaled(3.0), &h.scaled(2.0))
            .unwrap()
            .value;
        assert!((scaled - 1.5 * base).abs() < 1e-9 * base);
    }
}

#[test]
fn resistance_sketch_frequencies() {
    let eps = 0.1;
    let single = WeightedGraph::new(2, [(0, 1, 1.0)]).unwrap();
    let cases = [
        (single, (0, 1), 1.0),
        (path3(), (0, 2), 2.0),
        (triangle(), (0, 1), 2.0 / 3.0),
    ];
    for (g, (u, v), exact) in cases {
        let hits = (0..50u64)
            .filter(|&s| {
                let r = approx_effective_resistances(&g, eps, s)
                    .unwrap()
                    .query(u, v);
                (r - exact).abs() <= eps * exact
            })
            .count();
        assert!(hits >= 45, "{hits}/50 for exact {exact}");
    }
}

#[test]
fn sketched_stretch_frequencies() {
    let cases = [(path3(), path3(), 2.0), (triangle(), path3(), 4.0)];
    for (g, h, exact) in cases {
        let hits = (0..50u64)
            .filter(|&s| {
                let y = approx_stretch(&g, &h, 0.1, s).unwrap().value;
                (y - exact).abs() <= 0.1 * exact
            })
            .count();
        assert!(hits >= 45, "{hits}/50 for exact {exact}");
    }
    assert!(matches!(
        approx_stretch(&path3(), &path3(), 1.0, 0),
        Err(StretchError::InvalidParameter(_))
    ));
}

#[test]
fn triangle_lower_bound_is_tight() {
    let pld_h = oracles::graph_pld(&path3());
    let st = tree_stretch_exact(&triangle(), &path3()).unwrap().value;
    let (lo, hi) = pld_bounds_from_stretch(pld_h, st, 3).unwrap();
    let exact = oracles::graph_pld(&triangle());
    assert!((lo - 2.0 * 3f64.ln()).abs() < 1e-12);
    assert!((lo - exact).abs() < 1e-12);
    assert!(hi > exact);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(40))]

    #[test]
    fn trace_identity(seed in 0u64..10_000, n in 2usize..60) {
        let mut rng = oracles::rng(seed);
        let g = oracles::random_connected_graph(n, rng.random_range(0..2 * n), 0.1, 5.0, &mut rng);
        let h = oracles::random_connected_graph(n, rng.random_range(0..n), 0.1, 5.0, &mut rng);
        let st = generalized_stretch_exact(&g, &h).unwrap().value;
        let tr = dense_trace_identity(&g, &h);
        prop_assert!((st - tr).abs() <= 1e-8 * tr.max(1.0));
        let t = oracles::random_spanning_tree(&g, &mut rng);
        let tree = tree_stretch_exact(&g, &t).unwrap().value;
        let tr = dense_trace_identity(&g, &t);
        prop_assert!((tree - tr).abs() <= 1e-8 * tr.max(1.0));
    }

    #[test]
    fn stretch_inequality(seed in 0u64..10_000, n in 2usize..60) {
        let mut rng = oracles::rng(seed);
        let g = oracles::random_connected_graph(n, 2 * n, 0.1, 5.0, &mut rng);
        let h = oracles::random_connected_graph(n, n / 2, 0.1, 5.0, &mut rng);
        let st = generalized_stretch_exact(&g, &h).unwrap().value;
        let m = oracles::dense_laplacian(&h) * st - oracles::dense_laplacian(&g);
        prop_assert!(oracles::eigenvalues(&m)[0] >= -1e-8 * st);
    }

    #[test]
    fn monotone_in_both_arguments(seed in 0u64..10_000, n in 3usize..40) {
        let mut rng = oracles::rng(seed);
        let a = oracles::random_connected_graph(n, n / 2, 0.1, 5.0, &mut rng);
        let b = with_extra_edges(&a, n, &mut rng);
        let c = oracles::random_connected_graph(n, n, 0.1, 5.0, &mut rng);
        // L_A <= L_B.
        let st_a = generalized_stretch_exact(&c, &a).unwrap().value;
        let st_b = generalized_stretch_exact(&c, &b).unwrap().value;
        prop_assert!(st_a >= st_b * (1.0 - 1e-10));
        let over_a = generalized_stretch_exact(&a, &c).unwrap().value;
        let over_b = generalized_stretch_exact(&b, &c).unwrap().value;
        prop_assert!(over_a <= over_b * (1.0 + 1e-10));
    }

    #[test]
    fn sandwich_contains_pld(seed in 0u64..10_000, n in 2usize..100) {
        let mut rng = oracles::rng(seed);
        let g = oracles::random_connected_graph(n, rng.random_range(0..2 * n), 0.1, 5.0, &mut rng);
        let t = oracles::random_spanning_tree(&g, &mut rng);
        let st = tree_stretch_exact(&g, &t).unwrap().value;
        let (lo, hi) = pld_bounds_from_stretch(oracles::graph_pld(&t), st, n).unwrap();
        let exact = oracles::graph_pld(&g);
        let tol = 1e-9 * exact.abs().max(1.0);
        prop_assert!(lo <= exact + tol && exact <= hi + tol, "{lo} {exact} {hi}");
    }

    #[test]
    fn rank_one_below_pseudo_inverse_scaling(seed in 0u64..10_000, n in 2usize..30) {
        let mut rng = oracles::rng(seed);
        let rank = rng.random_range(1..=n);
        let m = DMatrix::<f64>::from_fn(n, rank, |_, _| rng.random_range(-1.0..1.0));
        let a = &m * m.transpose();
        let x = &a * DVector::<f64>::from_fn(n, |_, _| rng.random_range(-1.0..1.0));
        let c = x.dot(&(oracles::pinv(&a) * &x));
        let gap = &a * c - &x * x.transpose();
        let scale = a.norm() * c;
        prop_assert!(oracles::eigenvalues(&gap)[0] >= -1e-9 * scale.max(1.0));
    }

    #[test]
    fn jensen_for_matrix_log(seed in 0u64..10_000, n in 1usize..30) {
        let mut rng = oracles::rng(seed);
        let rank = rng.random_range(1..=n);
        let m = DMatrix::<f64>::from_fn(n, rank, |_, _| rng.random_range(-1.0..1.0));
        let a = &m * m.transpose();
        let ev = oracles::eigenvalues(&a);
        let top = ev[n - 1];
        let pos: Vec<f64> = ev.into_iter().filter(|&l| l > 1e-9 * top).collect();
        let p = pos.len() as f64;
        let ld: f64 = pos.iter().map(|l| l.ln()).sum();
        prop_assert!(ld <= p * (a.trace() / p).ln() + 1e-9);
    }
}
