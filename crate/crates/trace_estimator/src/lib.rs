//! Monte Carlo estimation of `n^-1 ln det(B^-1 A)` for a preconditioned
//! pair, by Gaussian trace sampling of the truncated logarithm series.

pub mod error;
pub mod estimator;
pub mod plan;

pub use error::{Result, TraceError};
pub use estimator::{
    approximate_power_sequence, finish_from_pilot, hutchinson_trace, mc_logdet_remainder,
    run_pilot, ApproxInverse, ExactInverse, Pilot, RemainderEstimate, RemainderProblem,
};
pub use plan::{
    empirical_bias, normal_quantile, plan_samples, plan_samples_with, solver_tolerance,
    truncation_for_bias, PlanRule, SamplePlan, ToleranceRule, PILOT_SAMPLES,
};
