use sparse_core::ops::{axpy, dot};
use sparse_core::LinearOperator;

use crate::error::{Result, SolverError};

#[derive(Debug, Clone, Copy)]
pub struct PcgOptions {
    /// Target relative error in the energy norm of the system matrix.
    pub nu: f64,
    /// Upper estimate of the condition number of the preconditioned
    /// operator, used to turn the residual into an error bound.
    pub kappa: f64,
    /// Overrides `10 sqrt(kappa) ln(1/nu) + 100`.
    pub max_iterations: Option<usize>,
}

impl PcgOptions {
    pub fn new(nu: f64, kappa: f64) -> Self {
        Self {
            nu,
            kappa,
            max_iterations: None,
        }
    }

    pub fn iteration_cap(&self) -> usize {
        self.max_iterations.unwrap_or_else(|| {
            (10.0 * self.kappa.max(1.0).sqrt() * (1.0 / self.nu).ln().max(1.0) + 100.0).ceil()
                as usize
        })
    }
}

#[derive(Debug, Clone)]
pub struct PcgResult {
    pub x: Vec<f64>,
    pub iterations: usize,
    pub converged: bool,
    /// Final value of `sqrt(kappa) |r|_{M^-1} / |b|_{M^-1}`; bounds the
    /// relative energy-norm error.
    pub certificate: f64,
}

impl PcgResult {
    pub fn into_result(self) -> Result<Vec<f64>> {
        if self.converged {
            Ok(self.x)
        } else {
            Err(SolverError::MaxIterationsExceeded {
                iterations: self.iterations,
                certificate: self.certificate,
            })
        }
    }
}

/// Preconditioned conjugate gradients with an energy-norm stopping rule.
///
/// With `M` the preconditioner and `kappa >= cond(M^-1 A)`,
/// `|x - A^-1 b|_A / |A^-1 b|_A <= sqrt(kappa) |r|_{M^-1} / |b|_{M^-1}`;
/// iteration stops once that bound is at most `nu / 2`. The
/// Polak-Ribiere form of beta keeps the iteration stable when the
/// preconditioner is itself an inexact solve.
pub fn pcg_solve(
    a: &dyn LinearOperator,
    b: &[f64],
    precond: &dyn LinearOperator,
    opts: &PcgOptions,
) -> Result<PcgResult> {
    let n = a.dim();
    if b.len() != n || precond.dim() != n {
        return Err(SolverError::DimensionMismatch {
            expected: n,
            got: if b.len() != n { b.len() } else { precond.dim() },
        });
    }
    let mut x = vec![0.0; n];
    let mut r = b.to_vec();
    let mut z = vec![0.0; n];
    precond.apply(&r, &mut z);
    let mut rz = dot(&r, &z);
    if rz <= 0.0 {
        return Ok(PcgResult {
            x,
            iterations: 0,
            converged: true,
            certificate: 0.0,
        });
    }
    let b_norm = rz.sqrt();
    let root_kappa = opts.kappa.max(1.0).sqrt();
    let cap = opts.iteration_cap();
    let mut p = z.clone();
    let mut q = vec![0.0; n];
    let mut z_old = vec![0.0; n];
    let mut certificate = root_kappa;
    for it in 1..=cap {
        a.apply(&p, &mut q);
        let pq = dot(&p, &q);
        if !(pq > 0.0) {
            return Ok(PcgResult {
                x,
                iterations: it,
                converged: false,
                certificate,
            });
        }
        let alpha = rz / pq;
        axpy(alpha, &p, &mut x);
        axpy(-alpha, &q, &mut r);
        z_old.copy_from_slice(&z);
        precond.apply(&r, &mut z);
        let rz_new = dot(&r, &z);
        certificate = root_kappa * rz_new.max(0.0).sqrt() / b_norm;
        if certificate <= 0.5 * opts.nu {
            return Ok(PcgResult {
                x,
                iterations: it,
                converged: true,
                certificate,
            });
        }
        let mut num = rz_new;
        num -= dot(&r, &z_old);
        let beta = (num / rz).max(0.0);
        rz = rz_new;
        for (pi, zi) in p.iter_mut().zip(&z) {
            *pi = zi + beta * *pi;
        }
    }
    Ok(PcgResult {
        x,
        iterations: cap,
        converged: false,
        certificate,
    })
}
