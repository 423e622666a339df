use rand_distr::{Distribution, StandardNormal};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use sparse_core::ops::{dot, norm2};
use sparse_core::seed::substream;
use sparse_core::LinearOperator;

use crate::error::{Result, TraceError};
use crate::plan::{PlanRule, SamplePlan, PILOT_SAMPLES};

/// An approximate inverse `x ~ B^-1 b`. Returns `false` when the solve
/// could not meet its tolerance; the result is still usable but the
/// caller must report the estimate as degraded.
pub trait ApproxInverse: Sync {
    fn dim(&self) -> usize;
    fn solve(&self, b: &[f64], x: &mut [f64]) -> bool;
}

impl<T: ApproxInverse + ?Sized> ApproxInverse for &T {
    fn dim(&self) -> usize {
        (**self).dim()
    }
    fn solve(&self, b: &[f64], x: &mut [f64]) -> bool {
        (**self).solve(b, x)
    }
}

/// Wraps an operator that applies `B^-1` exactly (up to rounding).
pub struct ExactInverse<T>(pub T);

impl<T: LinearOperator> ApproxInverse for ExactInverse<T> {
    fn dim(&self) -> usize {
        self.0.dim()
    }
    fn solve(&self, b: &[f64], x: &mut [f64]) -> bool {
        self.0.apply(b, x);
        true
    }
}

/// Estimate `n^-1 ln det(B^-1 A)` given `A <= B <= kappa A` and a solver
/// for `B` with relative `B`-norm tolerance `nu`.
pub struct RemainderProblem<'a> {
    pub a: &'a dyn LinearOperator,
    pub b_solver: &'a dyn ApproxInverse,
    pub kappa: f64,
    pub nu: f64,
}

impl<'a> RemainderProblem<'a> {
    pub fn new(
        a: &'a dyn LinearOperator,
        b_solver: &'a dyn ApproxInverse,
        kappa: f64,
        nu: f64,
    ) -> Result<Self> {
        if a.dim() != b_solver.dim() {
            return Err(TraceError::DimensionMismatch {
                expected: a.dim(),
                got: b_solver.dim(),
            });
        }
        if !(kappa >= 1.0 && kappa.is_finite()) {
            return Err(TraceError::InvalidParameter(format!(
                "kappa = {kappa} must be >= 1"
            )));
        }
        if !(nu >= 0.0 && nu.is_finite()) {
            return Err(TraceError::InvalidParameter(format!(
                "nu = {nu} must be >= 0"
            )));
        }
        Ok(Self {
            a,
            b_solver,
            kappa,
            nu,
        })
    }

    pub fn dim(&self) -> usize {
        self.a.dim()
    }

    /// Spectral gap `1 / kappa` used for planning.
    pub fn delta(&self) -> f64 {
        1.0 / self.kappa
    }
}

/// Result of one Monte Carlo remainder run.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RemainderEstimate {
    /// Estimate of `n^-1 ln det(B^-1 A)`.
    pub estimate: f64,
    /// Standard error of the sample mean.
    pub std_error: f64,
    pub samples: usize,
    pub truncation: usize,
    pub solver_failures: usize,
    /// The plan asked for more samples than `max_samples` allowed; the
    /// estimate uses only the samples drawn so far.
    pub capped: bool,
}

impl RemainderEstimate {
    pub fn degraded(&self) -> bool {
        self.solver_failures > 0 || self.capped
    }

    fn exact_zero() -> Self {
        Self {
            estimate: 0.0,
            std_error: 0.0,
            samples: 0,
            truncation: 0,
            solver_failures: 0,
            capped: false,
        }
    }
}

fn gaussian_unit(n: usize, seed: u64, key: &[u64], j: usize) -> Vec<f64> {
    let mut rng = substream(seed, key, j as u64);
    let mut u: Vec<f64> = (0..n).map(|_| StandardNormal.sample(&mut rng)).collect();
    let s = norm2(&u);
    for v in u.iter_mut() {
        *v /= s;
    }
    u
}

/// One step `x <- x - C(A x)`, i.e. `x <- R x` with `R = I - B^-1 A`.
fn power_step(
    a: &dyn LinearOperator,
    c: &dyn ApproxInverse,
    x: &mut [f64],
    ax: &mut [f64],
    cax: &mut [f64],
) -> bool {
    a.apply(x, ax);
    let ok = c.solve(ax, cax);
    for (xi, ci) in x.iter_mut().zip(cax.iter()) {
        *xi -= ci;
    }
    ok
}

/// Iterates `x_{k+1} = x_k - C(A x_k)` for `k < l`, returning `x_1..x_l`.
pub fn approximate_power_sequence(
    a: &dyn LinearOperator,
    c: &dyn ApproxInverse,
    x0: &[f64],
    l: usize,
) -> Result<Vec<Vec<f64>>> {
    let n = a.dim();
    for got in [c.dim(), x0.len()] {
        if got != n {
            return Err(TraceError::DimensionMismatch { expected: n, got });
        }
    }
    if x0.iter().all(|&v| v == 0.0) {
        return Err(TraceError::InvalidParameter("start vector is zero".into()));
    }
    let mut x = x0.to_vec();
    let (mut ax, mut cax) = (vec![0.0; n], vec![0.0; n]);
    let mut out = Vec::with_capacity(l);
    for step in 1..=l {
        if !power_step(a, c, &mut x, &mut ax, &mut cax) {
            return Err(TraceError::SolverFailed { step });
        }
        out.push(x.clone());
    }
    Ok(out)
}

/// One sample of `-sum_{k<=l} u^T R^k u / k` with `u` uniform on the
/// sphere; the number of failed solves rides along.
fn remainder_sample(
    prob: &RemainderProblem,
    l: usize,
    seed: u64,
    key: &[u64],
    j: usize,
) -> (f64, usize) {
    let n = prob.dim();
    let u0 = gaussian_unit(n, seed, key, j);
    let mut x = u0.clone();
    let (mut ax, mut cax) = (vec![0.0; n], vec![0.0; n]);
    let mut z = 0.0;
    let mut failures = 0;
    for k in 1..=l {
        if !power_step(prob.a, prob.b_solver, &mut x, &mut ax, &mut cax) {
            failures += 1;
        }
        z -= dot(&u0, &x) / k as f64;
    }
    (z, failures)
}

fn samples(
    prob: &RemainderProblem,
    l: usize,
    seed: u64,
    key: &[u64],
    range: std::ops::Range<usize>,
) -> Vec<(f64, usize)> {
    range
        .into_par_iter()
        .map(|j| remainder_sample(prob, l, seed, key, j))
        .collect()
}

fn mean_and_std(values: &[(f64, usize)]) -> (f64, f64) {
    let p = values.len() as f64;
    let mean = values.iter().map(|v| v.0).sum::<f64>() / p;
    if values.len() < 2 {
        return (mean, 0.0);
    }
    let var = values.iter().map(|v| (v.0 - mean).powi(2)).sum::<f64>() / (p - 1.0);
    (mean, var.sqrt())
}

/// One sample's series, kept so it can be read at any truncation up to
/// its current length and extended further.
struct Series {
    u0: Vec<f64>,
    x: Vec<f64>,
    /// Partial sums after `k = 1, 2, ...` terms.
    z: Vec<f64>,
    /// Failed solves among the first `k` steps.
    failures: Vec<usize>,
}

impl Series {
    fn new(n: usize, seed: u64, key: &[u64], j: usize) -> Self {
        let u0 = gaussian_unit(n, seed, key, j);
        Self {
            x: u0.clone(),
            u0,
            z: Vec::new(),
            failures: Vec::new(),
        }
    }

    /// Same arithmetic, in the same order, as [`remainder_sample`].
    fn extend_to(&mut self, prob: &RemainderProblem, l: usize) {
        let n = self.u0.len();
        let (mut ax, mut cax) = (vec![0.0; n], vec![0.0; n]);
        let mut z = self.z.last().copied().unwrap_or(0.0);
        let mut failures = self.failures.last().copied().unwrap_or(0);
        for k in (self.z.len() + 1)..=l {
            if !power_step(prob.a, prob.b_solver, &mut self.x, &mut ax, &mut cax) {
                failures += 1;
            }
            z -= dot(&self.u0, &self.x) / k as f64;
            self.z.push(z);
            self.failures.push(failures);
        }
    }

    fn at(&self, l: usize) -> (f64, usize) {
        if l == 0 {
            (0.0, 0)
        } else {
            (self.z[l - 1], self.failures[l - 1])
        }
    }
}

/// Pilot samples of a remainder run, reusable by the full run at any
/// truncation length.
pub struct Pilot {
    series: Vec<Series>,
}

impl Pilot {
    pub fn samples(&self) -> usize {
        self.series.len()
    }

    /// Length of the computed series.
    pub fn truncation(&self) -> usize {
        self.series.first().map_or(0, |s| s.z.len())
    }

    fn extend_to(&mut self, prob: &RemainderProblem, l: usize) {
        self.series
            .par_iter_mut()
            .for_each(|s| s.extend_to(prob, l));
    }

    fn values(&self, l: usize) -> Vec<(f64, usize)> {
        self.series.iter().map(|s| s.at(l)).collect()
    }

    /// Sample standard deviation of the values truncated at `l`, which
    /// must not exceed [`Pilot::truncation`].
    pub fn std_at(&self, l: usize) -> f64 {
        mean_and_std(&self.values(l)).1
    }
}

/// Draws samples `0..count` of the series truncated at `l`.
pub fn run_pilot(prob: &RemainderProblem, count: usize, l: usize, seed: u64, key: &[u64]) -> Pilot {
    let n = prob.dim();
    let mut pilot = Pilot {
        series: (0..count).map(|j| Series::new(n, seed, key, j)).collect(),
    };
    pilot.extend_to(prob, l);
    pilot
}

/// Completes an empirical-rule run from its pilot: the pilot series are
/// extended or cut to `plan.l`, their spread sizes the run, and samples
/// from `pilot.samples()` onward are drawn fresh. The result equals what
/// a single run with the same plan and pilot size would produce.
pub fn finish_from_pilot(
    prob: &RemainderProblem,
    mut pilot: Pilot,
    plan: &SamplePlan,
    seed: u64,
    key: &[u64],
) -> Result<RemainderEstimate> {
    if plan.n != prob.dim() {
        return Err(TraceError::DimensionMismatch {
            expected: prob.dim(),
            got: plan.n,
        });
    }
    if prob.kappa == 1.0 {
        return Ok(RemainderEstimate::exact_zero());
    }
    let cap = plan.max_samples.unwrap_or(usize::MAX).max(1);
    let l = plan.l;
    if pilot.truncation() < l {
        pilot.extend_to(prob, l);
    }
    let mut values = pilot.values(l);
    values.truncate(cap);
    let wanted = if values.len() >= 2 {
        plan.empirical_samples(mean_and_std(&values).1)
            .max(values.len())
    } else {
        plan.p
    };
    let capped = wanted > cap;
    let p = wanted.min(cap);
    let start = values.len();
    values.extend(samples(prob, l, seed, key, start..p));
    let (mean, s) = mean_and_std(&values);
    Ok(RemainderEstimate {
        estimate: mean,
        std_error: s / (p as f64).sqrt(),
        samples: p,
        truncation: l,
        solver_failures: values.iter().map(|v| v.1).sum(),
        capped,
    })
}

/// Monte Carlo estimate of `n^-1 ln det(B^-1 A)` from the truncated
/// series in powers of `R = I - B^-1 A`.
///
/// Sample `j` draws its probe from substream `j` of `(seed, key)` and
/// values are summed in index order, so the result does not depend on the
/// number of threads.
pub fn mc_logdet_remainder(
    prob: &RemainderProblem,
    plan: &SamplePlan,
    seed: u64,
    key: &[u64],
) -> Result<RemainderEstimate> {
    if plan.n != prob.dim() {
        return Err(TraceError::DimensionMismatch {
            expected: prob.dim(),
            got: plan.n,
        });
    }
    if prob.kappa == 1.0 {
        // A <= B <= A forces B = A.
        return Ok(RemainderEstimate::exact_zero());
    }
    let cap = plan.max_samples.unwrap_or(usize::MAX).max(1);
    if plan.rule == PlanRule::Empirical {
        let pilot = run_pilot(prob, PILOT_SAMPLES.min(plan.p).min(cap), plan.l, seed, key);
        return finish_from_pilot(prob, pilot, plan, seed, key);
    }
    let p = plan.p.min(cap);
    let values = samples(prob, plan.l, seed, key, 0..p);
    let (mean, s) = mean_and_std(&values);
    Ok(RemainderEstimate {
        estimate: mean,
        std_error: s / (p as f64).sqrt(),
        samples: p,
        truncation: plan.l,
        solver_failures: values.iter().map(|v| v.1).sum(),
        capped: plan.p > cap,
    })
}

/// Estimate of `n^-1 Tr(H)` from `p` Gaussian Rayleigh quotients.
pub fn hutchinson_trace(h: &dyn LinearOperator, p: usize, seed: u64, key: &[u64]) -> f64 {
    let n = h.dim();
    let vals: Vec<f64> = (0..p.max(1))
        .into_par_iter()
        .map(|j| {
            let u = gaussian_unit(n, seed, key, j);
            let mut hu = vec![0.0; n];
            h.apply(&u, &mut hu);
            dot(&u, &hu) / dot(&u, &u)
        })
        .collect();
    vals.iter().sum::<f64>() / vals.len() as f64
}
