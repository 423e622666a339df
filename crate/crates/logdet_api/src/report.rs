use serde::{Deserialize, Serialize};
use sparsifiers::ChainSummary;
use trace_estimator::{PlanRule, ToleranceRule};

use crate::error::{LogdetError, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Method {
    Tree,
    Ultra,
    Fast,
    Bounds,
}

impl Method {
    pub fn as_str(self) -> &'static str {
        match self {
            Self::Tree => "tree",
            Self::Ultra => "ultra",
            Self::Fast => "fast",
            Self::Bounds => "bounds",
        }
    }
}

/// Default limit on `samples * truncation` for one Monte Carlo run.
pub const DEFAULT_MAX_WORK: u64 = 20_000_000;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EstimateOptions {
    /// Target error of the per-vertex estimate `n^-1 ln det A`.
    pub eps: f64,
    /// Failure probability.
    pub eta: f64,
    pub seed: u64,
    pub plan_rule: PlanRule,
    pub tolerance_rule: ToleranceRule,
    /// Runs whose plan needs more than this many power steps in total
    /// are not executed; the estimate falls back to the stretch bounds.
    pub max_work: u64,
}

impl Default for EstimateOptions {
    fn default() -> Self {
        Self {
            eps: 0.1,
            eta: 0.1,
            seed: 42,
            plan_rule: PlanRule::default(),
            tolerance_rule: ToleranceRule::default(),
            max_work: DEFAULT_MAX_WORK,
        }
    }
}

impl EstimateOptions {
    pub fn new(eps: f64, eta: f64, seed: u64) -> Self {
        Self {
            eps,
            eta,
            seed,
            ..Self::default()
        }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.eps > 0.0 && self.eps.is_finite()) {
            return Err(LogdetError::InvalidParameter(format!(
                "eps = {} must be positive",
                self.eps
            )));
        }
        if !(self.eta > 0.0 && self.eta < 1.0) {
            return Err(LogdetError::InvalidParameter(format!(
                "eta = {} must lie in (0, 1)",
                self.eta
            )));
        }
        Ok(())
    }
}

/// Which reduced Laplacian a run belongs to.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Side {
    /// The `2n`-vertex Laplacian (added).
    Tilde,
    /// The `n`-vertex Laplacian (subtracted).
    Hat,
}

impl Side {
    pub fn sign(self) -> f64 {
        match self {
            Self::Tilde => 1.0,
            Self::Hat => -1.0,
        }
    }
}

/// Diagnostics of one Monte Carlo remainder run.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LevelReport {
    pub side: Side,
    pub component: usize,
    pub level: usize,
    /// Grounded dimension of the run.
    pub dim: usize,
    /// Edges of the level graph and of its preconditioner.
    pub edges: usize,
    pub precond_edges: usize,
    pub kappa: f64,
    pub kappa_b: Option<f64>,
    pub nu: f64,
    /// Per-dimension precision and failure probability given to the run.
    pub eps: f64,
    pub eta: f64,
    pub samples: usize,
    pub truncation: usize,
    /// Estimate of `dim^-1 ln det(B^-1 A)`.
    pub remainder: f64,
    pub std_error: f64,
    pub solver_failures: usize,
    pub capped: bool,
}

/// Preconditioning chain built for one component.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ChainReport {
    pub side: Side,
    pub component: usize,
    pub chain: ChainSummary,
}

/// Result of a log-determinant estimate.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EstimateReport {
    /// Estimate of `n^-1 ln det A`.
    pub estimate: f64,
    /// `n * estimate`.
    pub raw_logdet: f64,
    /// Deterministic bounds on `n^-1 ln det A` from tree stretch.
    pub lower: Option<f64>,
    pub upper: Option<f64>,
    /// Half-width of the sparsifier sandwich (fast method only).
    pub half_width: Option<f64>,
    pub eps: f64,
    pub eta: f64,
    pub seed: u64,
    pub method: Method,
    pub n: usize,
    /// Stored off-diagonal nonzeros (upper triangle).
    pub m: usize,
    pub levels: Vec<LevelReport>,
    /// Empty unless the method builds chains.
    pub chains: Vec<ChainReport>,
    pub degraded: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub degraded_reason: Option<String>,
    pub time_ms: f64,
}
