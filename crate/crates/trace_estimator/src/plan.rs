use serde::{Deserialize, Serialize};
use statrs::distribution::{ContinuousCDF, Normal};

use crate::error::{Result, TraceError};

/// Samples drawn before the empirical rule sizes the full run.
pub const PILOT_SAMPLES: usize = 24;

/// How the sample count and truncation length are chosen.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PlanRule {
    /// The closed-form bounds with their published constants.
    Theorem,
    /// Smallest `l` whose tail bound is at most `eps / 2`, and a Bernstein
    /// sample count with the variance and range constants worked out
    /// explicitly instead of rounded up.
    ProofTight,
    /// Truncation bias and sampling error share `eps` in the proportion
    /// that minimizes `p * l`; the sample count comes from a pilot run's
    /// standard deviation and a normal quantile, capped at the theorem
    /// count.
    #[default]
    Empirical,
}

/// Sample count `p` and truncation length `l` for one Monte Carlo run.
///
/// Under [`PlanRule::Empirical`], `p` is the ceiling the pilot may grow to.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SamplePlan {
    pub p: usize,
    pub l: usize,
    pub eps: f64,
    /// Part of `eps` reserved for the truncation tail; the sampling error
    /// gets the rest.
    pub bias: f64,
    pub eta: f64,
    pub delta: f64,
    pub n: usize,
    pub rule: PlanRule,
    /// Hard limit on samples; exceeding it marks the run as capped.
    pub max_samples: Option<usize>,
}

fn check(eps: f64, eta: f64, delta: f64, n: usize) -> Result<()> {
    if !(eps > 0.0 && eps.is_finite()) {
        return Err(TraceError::InvalidParameter(format!(
            "eps = {eps} must be positive"
        )));
    }
    if !(eta > 0.0 && eta < 1.0) {
        return Err(TraceError::InvalidParameter(format!(
            "eta = {eta} must lie in (0, 1)"
        )));
    }
    if !(delta > 0.0 && delta < 1.0) {
        return Err(TraceError::InvalidParameter(format!(
            "delta = {delta} must lie in (0, 1)"
        )));
    }
    if n == 0 {
        return Err(TraceError::InvalidParameter(
            "dimension must be positive".into(),
        ));
    }
    Ok(())
}

fn ceil_count(x: f64) -> usize {
    // `as` saturates, so absurd plans become usize::MAX rather than wrap.
    (x.ceil().max(1.0)) as usize
}

/// `16 (1/eps + 1/(n eps^2)) ln(2/eta) ln^2(1/delta)`.
pub fn theorem_samples(eps: f64, eta: f64, delta: f64, n: usize) -> usize {
    let r = (1.0 / delta).ln();
    ceil_count(16.0 * (1.0 / eps + 1.0 / (n as f64 * eps * eps)) * (2.0 / eta).ln() * r * r)
}

/// `2 delta^-1 ln(n / (delta eps))`.
pub fn theorem_truncation(eps: f64, delta: f64, n: usize) -> usize {
    ceil_count(2.0 / delta * (n as f64 / (delta * eps)).ln())
}

/// Smallest `l` with `(1-delta)^(l+1) / ((l+1) delta) <= bias`.
pub fn truncation_for_bias(bias: f64, delta: f64) -> usize {
    let q = (1.0 - delta).ln();
    let ok = |l: usize| {
        let k = (l + 1) as f64;
        (k * q).exp() / (k * delta) <= bias
    };
    let mut hi = 1usize;
    while !ok(hi) {
        hi *= 2;
    }
    let mut lo = 0usize;
    // Invariant: ok(hi), and lo == 0 or !ok(lo).
    while hi - lo > 1 {
        let mid = lo + (hi - lo) / 2;
        if ok(mid) {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    if lo == 0 && ok(0) {
        1
    } else {
        hi
    }
}

/// Smallest `l` with `(1-delta)^(l+1) / ((l+1) delta) <= eps / 2`.
pub fn tight_truncation(eps: f64, delta: f64) -> usize {
    truncation_for_bias(eps / 2.0, delta)
}

/// Truncation bias in `[eps/4, eps/2]` minimizing `l(bias) / (eps - bias)^2`,
/// which is proportional to the work of a run whose sample count scales
/// with the inverse square of the sampling error. The floor keeps some
/// slack for the normal approximation behind the empirical count.
pub fn empirical_bias(eps: f64, delta: f64) -> f64 {
    (0..=10)
        .map(|i| eps * (0.25 + 0.025 * i as f64))
        .map(|b| (b, truncation_for_bias(b, delta) as f64 / (eps - b).powi(2)))
        .min_by(|a, b| a.1.total_cmp(&b.1))
        .map(|(b, _)| b)
        .unwrap_or(eps / 2.0)
}

/// Bernstein count for the mean of values in `[0, r]` with variance at
/// most `2 r^2 / n`, deviation `eps / 2`, `r = ln(1/delta)`.
pub fn tight_samples(eps: f64, eta: f64, delta: f64, n: usize) -> usize {
    let r = (1.0 / delta).ln();
    let sigma2 = 2.0 * r * r / n as f64;
    let t = eps / 2.0;
    ceil_count((2.0 / eta).ln() * (2.0 * sigma2 + 2.0 / 3.0 * r * t) / (t * t))
}

/// Two-sided normal quantile `z_{1 - eta/2}`.
pub fn normal_quantile(eta: f64) -> f64 {
    Normal::standard().inverse_cdf(1.0 - eta / 2.0)
}

/// Plan with the theorem constants: the smallest integers satisfying both
/// closed-form bounds.
pub fn plan_samples(eps: f64, eta: f64, delta: f64, n: usize) -> Result<SamplePlan> {
    plan_samples_with(PlanRule::Theorem, eps, eta, delta, n)
}

pub fn plan_samples_with(
    rule: PlanRule,
    eps: f64,
    eta: f64,
    delta: f64,
    n: usize,
) -> Result<SamplePlan> {
    check(eps, eta, delta, n)?;
    let bias = match rule {
        PlanRule::Empirical => empirical_bias(eps, delta),
        _ => eps / 2.0,
    };
    let (p, l) = match rule {
        PlanRule::Theorem => (
            theorem_samples(eps, eta, delta, n),
            theorem_truncation(eps, delta, n),
        ),
        PlanRule::ProofTight => (
            tight_samples(eps, eta, delta, n),
            tight_truncation(eps, delta),
        ),
        PlanRule::Empirical => (
            theorem_samples(eps, eta, delta, n).max(PILOT_SAMPLES),
            truncation_for_bias(bias, delta),
        ),
    };
    Ok(SamplePlan {
        p,
        l,
        eps,
        bias,
        eta,
        delta,
        n,
        rule,
        max_samples: None,
    })
}

impl SamplePlan {
    pub fn with_max_samples(mut self, cap: usize) -> Self {
        self.max_samples = Some(cap);
        self
    }

    /// Sample count the empirical rule asks for, given the pilot's
    /// standard deviation.
    pub fn empirical_samples(&self, pilot_std: f64) -> usize {
        let z = normal_quantile(self.eta);
        let need = (z * pilot_std / (self.eps - self.bias)).powi(2);
        let need = if need.is_finite() {
            ceil_count(need)
        } else {
            usize::MAX
        };
        need.clamp(PILOT_SAMPLES.min(self.p), self.p)
    }
}

/// Which bound on the solver tolerance to use.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ToleranceRule {
    /// `min(eps / (8 kappa^2 sqrt(kappa_b)), 1 / (2 kappa))`.
    #[default]
    Proof,
    /// `min(eps / (8 kappa^3 kappa_b), 1 / (2 kappa))`.
    Strict,
}

/// Relative `B`-norm tolerance required of the approximate `B^-1` for a
/// remainder estimate of precision `eps`, where `kappa` bounds
/// `A <= B <= kappa A` and `kappa_b` is the condition number of `B`.
pub fn solver_tolerance(eps: f64, kappa: f64, kappa_b: f64, rule: ToleranceRule) -> f64 {
    let k = kappa.max(1.0);
    let kb = kappa_b.max(1.0);
    let a = match rule {
        ToleranceRule::Proof => eps / (8.0 * k * k * kb.sqrt()),
        ToleranceRule::Strict => eps / (8.0 * k * k * k * kb),
    };
    a.min(1.0 / (2.0 * k))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn closed_form_example() {
        let p = plan_samples(0.1, 0.05, 0.5, 100).unwrap();
        let expect = 16.0 * 11.0 * 40f64.ln() * 2f64.ln().powi(2);
        assert_eq!(p.p, expect.ceil() as usize);
        assert_eq!(p.p, 312);
        assert_eq!(p.l, 31);
    }

    #[test]
    fn easy_spectrum() {
        let p = plan_samples(0.5, 0.5, 0.9, 1_000_000).unwrap();
        assert_eq!(p.l, (20.0 / 9.0 * (1e6f64 / 0.45).ln()).ceil() as usize);
        assert!(p.p < 10);
    }

    #[test]
    fn domain_checks() {
        assert!(plan_samples(0.1, 1.0, 0.5, 10).is_err());
        assert!(plan_samples(0.1, 0.0, 0.5, 10).is_err());
        assert!(plan_samples(0.0, 0.1, 0.5, 10).is_err());
        assert!(plan_samples(0.1, 0.1, 1.0, 10).is_err());
        assert!(plan_samples(0.1, 0.1, 0.5, 0).is_err());
    }

    #[test]
    fn tight_truncation_is_minimal() {
        for &(eps, delta) in &[(0.1, 0.5), (0.01, 0.01), (0.2, 0.9), (1e-3, 0.3)] {
            let l = tight_truncation(eps, delta);
            let tail = |l: usize| (1.0 - delta).powi(l as i32 + 1) / ((l + 1) as f64 * delta);
            assert!(tail(l) <= eps / 2.0);
            assert!(l == 1 || tail(l - 1) > eps / 2.0);
            assert!(l <= theorem_truncation(eps, delta, 1));
        }
    }

    #[test]
    fn tolerance_rules() {
        let proof = solver_tolerance(0.1, 4.0, 100.0, ToleranceRule::Proof);
        let strict = solver_tolerance(0.1, 4.0, 100.0, ToleranceRule::Strict);
        assert!((proof - 0.1 / (8.0 * 16.0 * 10.0)).abs() < 1e-18);
        assert!(strict < proof);
        assert_eq!(
            solver_tolerance(100.0, 2.0, 1.0, ToleranceRule::Proof),
            0.25
        );
    }

    #[test]
    fn empirical_count_is_clamped() {
        let p = plan_samples_with(PlanRule::Empirical, 0.1, 0.1, 0.5, 100).unwrap();
        assert_eq!(p.empirical_samples(0.0), PILOT_SAMPLES);
        assert_eq!(p.empirical_samples(1e9), p.p);
        let z = normal_quantile(0.1);
        assert!((z - 1.6448536269514722).abs() < 1e-9);
    }
}
