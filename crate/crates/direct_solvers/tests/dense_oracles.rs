use direct_solvers::*;
use nalgebra::{DMatrix, DVector};
use proptest::prelude::*;
use rand::Rng;
use reduction::grounded_laplacian;
use sparse_core::ops::norm2;
use sparse_core::tree::shortest_path_tree;
use sparse_core::{laplacian_of, LinearOperator, WeightedGraph};

fn dense_solve(m: &DMatrix<f64>, b: &[f64]) -> DVector<f64> {
    m.clone()
        .cholesky()
        .unwrap()
        .solve(&DVector::from_column_slice(b))
}

#[test]
fn tree_pld_matches_eigenvalues() {
    let path = WeightedGraph::new(3, [(0, 1, 1.0), (1, 2, 1.0)]).unwrap();
    let star = WeightedGraph::new(4, [(0, 1, 1.0), (0, 2, 1.0), (0, 3, 1.0)]).unwrap();
    let edge = WeightedGraph::new(2, [(0, 1, 5.0)]).unwrap();
    for (t, want) in [(path, 3f64.ln()), (star, 4f64.ln()), (edge, 10f64.ln())] {
        let f = tree_factorize(&t, t.n() - 1).unwrap();
        let pld = (t.n() as f64).ln() + f.logdet();
        assert!((pld - want).abs() < 1e-12);
        assert!((oracles::graph_pld(&t) - want).abs() < 1e-10);
    }
}

#[test]
fn tree_solve_residual_large() {
    let mut rng = oracles::rng(21);
    let t = oracles::random_connected_graph(500, 0, 0.1, 10.0, &mut rng);
    for ground in [0, 250, 499] {
        let f = tree_factorize(&t, ground).unwrap();
        let b: Vec<f64> = (0..499).map(|_| rng.random_range(-1.0..1.0)).collect();
        let x = tree_solve(&f, &b).unwrap();
        let fm = grounded_laplacian(&t, ground);
        let r: Vec<f64> = fm
            .matvec(&x)
            .unwrap()
            .iter()
            .zip(&b)
            .map(|(a, c)| a - c)
            .collect();
        assert!(norm2(&r) <= 1e-10 * norm2(&b));
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(40))]

    #[test]
    fn tree_solve_inverts_multiply(seed in 0u64..10_000, n in 2usize..80) {
        let mut rng = oracles::rng(seed);
        let t = oracles::random_connected_graph(n, 0, 0.1, 10.0, &mut rng);
        let g = rng.random_range(0..n);
        let f = tree_factorize(&t, g).unwrap();
        let fm = grounded_laplacian(&t, g);
        let x: Vec<f64> = (0..n - 1).map(|_| rng.random_range(-1.0..1.0)).collect();
        let y = tree_solve(&f, &fm.matvec(&x).unwrap()).unwrap();
        for (a, b) in x.iter().zip(&y) {
            prop_assert!((a - b).abs() <= 1e-10 * (1.0 + norm2(&x)));
        }
    }

    #[test]
    fn greedy_on_trees_matches_tree_pivots(seed in 0u64..10_000, n in 2usize..120) {
        let mut rng = oracles::rng(seed);
        let t = oracles::random_connected_graph(n, 0, 0.1, 10.0, &mut rng);
        let pc = greedy_eliminate(&laplacian_of(&t)).unwrap();
        prop_assert!(pc.survivors.len() <= 1);
        prop_assert!(pc.pivots().iter().all(|&p| p > 0.0));
        let tf = tree_factorize(&t, n - 1).unwrap();
        prop_assert!((pc.log_pivot_sum() - tf.logdet()).abs() <= 1e-10 * (1.0 + tf.logdet().abs()));
    }

    #[test]
    fn partial_cholesky_determinant_recursion(seed in 0u64..10_000, n in 3usize..200) {
        let mut rng = oracles::rng(seed);
        let extra = rng.random_range(0..n);
        let g = oracles::random_connected_graph(n, extra, 0.1, 5.0, &mut rng);
        let pc = greedy_eliminate_graph(&g);
        let full = oracles::logdet(&oracles::ground(&oracles::dense_laplacian(&g), n - 1));
        let k = pc.survivors.len();
        let rest = if k > 1 {
            oracles::logdet(&oracles::ground(&oracles::dense_laplacian(&pc.remaining), k - 1))
        } else {
            0.0
        };
        prop_assert!((pc.log_pivot_sum() + rest - full).abs() < 1e-8 * full.abs().max(1.0));
        // Stopping rule.
        let adj = pc.remaining.adjacency();
        prop_assert!(k <= 1 || (0..k).all(|v| adj.degree(v) >= 3));
        // Remaining matrix is a Laplacian of the surviving vertices.
        prop_assert!(sparse_core::graph_of(&pc.remaining_laplacian()).is_ok());
    }

    #[test]
    fn partial_cholesky_solve(seed in 0u64..10_000, n in 3usize..100) {
        let mut rng = oracles::rng(seed);
        let g = oracles::random_connected_graph(n, n, 0.1, 5.0, &mut rng);
        let pc = greedy_eliminate_graph(&g);
        let ground = *pc.survivors.last().unwrap();
        let b: Vec<f64> = (0..n).map(|i| if i == ground { 0.0 } else { rng.random_range(-1.0..1.0) }).collect();
        let mut y = b.clone();
        pc.forward(&mut y, ground);
        let k = pc.survivors.len();
        let mut x = vec![0.0; n];
        if k > 1 {
            let lg = pc.local[ground];
            let sub = GroundedDense::new(&pc.remaining, lg).unwrap();
            let yl: Vec<f64> = pc.survivors.iter().map(|&v| y[v]).collect();
            let mut xl = vec![0.0; k];
            sub.solve_pinned(&yl, lg, &mut xl);
            for (i, &v) in pc.survivors.iter().enumerate() {
                x[v] = xl[i];
            }
        }
        pc.backward(&y, &mut x);
        let want = dense_solve(&oracles::ground(&oracles::dense_laplacian(&g), ground), &reduction::restrict(&b, ground));
        let got = reduction::restrict(&x, ground);
        for (a, w) in got.iter().zip(want.iter()) {
            prop_assert!((a - w).abs() <= 1e-9 * (1.0 + want.norm()));
        }
    }

    #[test]
    fn schur_complement_condition_bound(seed in 0u64..10_000, n in 2usize..50) {
        let mut rng = oracles::rng(seed);
        let a = oracles::dense(&oracles::random_sdd(n, 0.3, &mut rng));
        let ev = oracles::eigenvalues(&a);
        let kappa = ev[n - 1] / ev[0];
        let s = a.view((1, 1), (n - 1, n - 1)) - a.view((1, 0), (n - 1, 1)) * a.view((0, 1), (1, n - 1)) / a[(0, 0)];
        if n > 1 {
            let es = oracles::eigenvalues(&s);
            prop_assert!(es[n - 2] / es[0] <= kappa * (1.0 + 1e-9));
        }
    }
}

#[test]
fn reground_matches_dense_at_other_ground() {
    let mut rng = oracles::rng(8);
    let g = oracles::random_connected_graph(30, 40, 0.2, 4.0, &mut rng);
    let solver = GroundedDense::new(&g, 0).unwrap();
    let b: Vec<f64> = (0..30).map(|_| rng.random_range(-1.0..1.0)).collect();
    let mut x = vec![0.0; 30];
    solver.solve_pinned(&b, 17, &mut x);
    assert_eq!(x[17], 0.0);
    let want = dense_solve(
        &oracles::ground(&oracles::dense_laplacian(&g), 17),
        &reduction::restrict(&b, 17),
    );
    for (a, w) in reduction::restrict(&x, 17).iter().zip(want.iter()) {
        assert!((a - w).abs() < 1e-10);
    }
}

#[test]
fn pcg_energy_error_on_grid_with_tree_preconditioner() {
    let g = oracles::grid(20, 20);
    let ground = 399;
    let f = grounded_laplacian(&g, ground);
    let tree = shortest_path_tree(&g, 210).unwrap();
    let tf = tree_factorize(&tree, ground).unwrap();
    let pre = GroundedInverse::new(&tf, ground);
    let kappa = 2.0 * pencil_lambda_max(&f, &pre, 50);
    let mut rng = oracles::rng(4);
    let b: Vec<f64> = (0..399).map(|_| rng.random_range(-1.0..1.0)).collect();
    let nu = 1e-6;
    let r = pcg_solve(&f, &b, &pre, &PcgOptions::new(nu, kappa)).unwrap();
    assert!(r.converged);
    let fd = oracles::dense(&f);
    let exact = dense_solve(&fd, &b);
    let err = DVector::from_column_slice(&r.x) - &exact;
    let rel = (err.dot(&(&fd * &err))).sqrt() / (exact.dot(&(&fd * &exact))).sqrt();
    assert!(rel <= nu, "relative energy error {rel:e}");
}

#[test]
fn condition_estimate_of_grounded_path() {
    let p = WeightedGraph::new(10, (0..9).map(|i| (i, i + 1, 1.0))).unwrap();
    let f = grounded_laplacian(&p, 9);
    let tf = tree_factorize(&p, 9).unwrap();
    let k = estimate_condition_number(&f, &GroundedInverse::new(&tf, 9));
    let ev = oracles::eigenvalues(&oracles::dense(&f));
    let exact = ev[8] / ev[0];
    assert!(k >= exact / 4.0 && k <= exact * 4.0, "{k} vs {exact}");
}

#[test]
fn iterative_graph_solver_residual() {
    let g = oracles::grid(40, 40);
    let s = GraphSolver::new(&g, 1e-10).unwrap();
    assert!(matches!(s, GraphSolver::Iterative(_)));
    let mut rng = oracles::rng(2);
    let b: Vec<f64> = (0..1600).map(|_| rng.random_range(-1.0..1.0)).collect();
    let mut x = vec![0.0; 1600];
    s.solve_pinned(&b, 5, &mut x);
    let f = reduction::grounded_laplacian(&g, 5);
    let xr = reduction::restrict(&x, 5);
    let br = reduction::restrict(&b, 5);
    let mut ax = vec![0.0; 1599];
    f.apply(&xr, &mut ax);
    let res: f64 = ax
        .iter()
        .zip(&br)
        .map(|(a, b)| (a - b) * (a - b))
        .sum::<f64>()
        .sqrt();
    assert!(res <= 1e-6 * norm2(&br), "{res}");
    assert_eq!(s.failures(), 0);
}
