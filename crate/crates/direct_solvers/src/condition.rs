use rand::Rng;
use rand_distr::StandardNormal;
use sparse_core::ops::{dot, norm2};
use sparse_core::{seed, LinearOperator};

/// Iterations used for each end of the spectrum.
pub const POWER_ITERATIONS: usize = 50;
/// Inflation applied to measured condition numbers.
pub const SAFETY_FACTOR: f64 = 2.0;

fn start_vector(n: usize, label: &str) -> Vec<f64> {
    let mut rng = seed::stream(0x00C0_FFEE, &[seed::tag(label), n as u64]);
    let mut x: Vec<f64> = (0..n).map(|_| rng.sample(StandardNormal)).collect();
    let s = norm2(&x);
    x.iter_mut().for_each(|v| *v /= s);
    x
}

/// Largest eigenvalue of a symmetric positive semidefinite operator by
/// power iteration (Rayleigh quotient of the last iterate, so a lower
/// estimate).
pub fn lambda_max(op: &dyn LinearOperator, iterations: usize) -> f64 {
    let n = op.dim();
    if n == 0 {
        return 0.0;
    }
    let mut x = start_vector(n, "lambda_max");
    let mut y = vec![0.0; n];
    let mut rq = 0.0;
    for _ in 0..iterations {
        op.apply(&x, &mut y);
        rq = dot(&x, &y);
        let s = norm2(&y);
        if s == 0.0 {
            return 0.0;
        }
        for (xi, yi) in x.iter_mut().zip(&y) {
            *xi = yi / s;
        }
    }
    rq
}

/// Condition number estimate `2 lambda_max / lambda_min` of a positive
/// definite operator, with `solver` applying (approximately) its inverse.
pub fn estimate_condition_number(op: &dyn LinearOperator, solver: &dyn LinearOperator) -> f64 {
    let hi = lambda_max(op, POWER_ITERATIONS);
    let inv_hi = lambda_max(solver, POWER_ITERATIONS);
    SAFETY_FACTOR * hi * inv_hi
}

/// Largest generalized eigenvalue of the pencil `(A, B)`, i.e. of
/// `B^-1 A`, by power iteration in the `A` inner product; `b_inv` applies
/// `B^-1`. Returns a lower estimate (no safety factor).
pub fn pencil_lambda_max(
    a: &dyn LinearOperator,
    b_inv: &dyn LinearOperator,
    iterations: usize,
) -> f64 {
    let n = a.dim();
    if n == 0 {
        return 1.0;
    }
    let mut x = start_vector(n, "pencil");
    let mut ax = vec![0.0; n];
    let mut y = vec![0.0; n];
    let mut best = 0.0f64;
    for _ in 0..iterations {
        a.apply(&x, &mut ax);
        b_inv.apply(&ax, &mut y);
        let energy = dot(&x, &ax);
        if energy <= 0.0 {
            break;
        }
        best = best.max(dot(&ax, &y) / energy);
        let s = norm2(&y);
        for (xi, yi) in x.iter_mut().zip(&y) {
            *xi = yi / s;
        }
    }
    best
}

#[cfg(test)]
mod tests {
    use super::*;
    use sparse_core::ops::{Diagonal, Identity};

    #[test]
    fn identity_condition() {
        let k = estimate_condition_number(&Identity(6), &Identity(6));
        assert!((1.0..=4.0).contains(&k), "{k}");
    }

    #[test]
    fn diagonal_condition() {
        let k = estimate_condition_number(&Diagonal(vec![1.0, 100.0]), &Diagonal(vec![1.0, 0.01]));
        assert!((50.0..=400.0).contains(&k), "{k}");
    }

    #[test]
    fn pencil_of_diagonals() {
        let a = Diagonal(vec![1.0, 2.0, 8.0]);
        let b_inv = Diagonal(vec![1.0, 1.0, 0.5]);
        let l = pencil_lambda_max(&a, &b_inv, 50);
        assert!((l - 4.0).abs() < 1e-6, "{l}");
    }
}
