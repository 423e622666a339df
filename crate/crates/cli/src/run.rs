use std::time::Instant;

use direct_solvers::dense_logdet;
use logdet_api::{
    bounds_report, fast_inexact_logdet, tree_logdet, ultra_logdet, EstimateOptions, EstimateReport,
    Method,
};
use serde::{Deserialize, Serialize};
use sparse_core::SymmetricSparse;

use crate::config::{Command, RunConfig, Source};
use crate::error::{CliError, Result};
use crate::generate::generate;
use crate::mm::{format_matrix_market, read_matrix_market};

pub const EXIT_OK: i32 = 0;
pub const EXIT_VERIFY_FAILED: i32 = 2;
pub const EXIT_INVALID: i32 = 3;
pub const EXIT_DEGRADED: i32 = 4;

/// Relative slack allowed when checking the bounds against the dense value.
pub const BOUNDS_SLACK: f64 = 1e-9;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VerifyReport {
    pub method: Method,
    pub n: usize,
    pub estimate: f64,
    /// Dense `ln det A / n`.
    pub dense: f64,
    pub error: f64,
    pub eps: f64,
    pub lower: Option<f64>,
    pub upper: Option<f64>,
    pub pass: bool,
    pub report: EstimateReport,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BenchRun {
    pub seed: u64,
    pub estimate: f64,
    pub degraded: bool,
    pub time_ms: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BenchReport {
    pub method: Method,
    pub n: usize,
    pub m: usize,
    pub eps: f64,
    pub eta: f64,
    pub runs: Vec<BenchRun>,
    pub mean_time_ms: f64,
}

/// What a command produced: text for the output and the exit code.
#[derive(Debug, Clone, PartialEq)]
pub struct Outcome {
    pub text: String,
    pub exit_code: i32,
}

pub fn load(source: &Source, seed: u64) -> Result<SymmetricSparse> {
    match source {
        Source::File(p) => read_matrix_market(p),
        Source::Generated {
            kind,
            weights,
            shift,
        } => generate(*kind, *weights, *shift, seed),
    }
}

pub fn options(cfg: &RunConfig) -> EstimateOptions {
    EstimateOptions::new(cfg.eps, cfg.eta, cfg.seed)
}

pub fn estimate(
    a: &SymmetricSparse,
    method: Method,
    opts: &EstimateOptions,
) -> Result<EstimateReport> {
    Ok(match method {
        Method::Tree => tree_logdet(a, opts)?,
        Method::Ultra => ultra_logdet(a, opts)?,
        Method::Fast => fast_inexact_logdet(a, opts)?,
        Method::Bounds => bounds_report(a, opts)?,
    })
}

pub fn verify(a: &SymmetricSparse, cfg: &RunConfig) -> Result<VerifyReport> {
    if a.n() > cfg.dense_cap {
        return Err(CliError::OracleTooLarge {
            n: a.n(),
            cap: cfg.dense_cap,
        });
    }
    let report = estimate(a, cfg.method, &options(cfg))?;
    let dense = dense_logdet(a).map_err(logdet_api::LogdetError::from)? / a.n() as f64;
    let error = (report.estimate - dense).abs();
    let pass = match cfg.method {
        Method::Bounds => {
            let slack = BOUNDS_SLACK * dense.abs().max(1.0);
            let lo = report.lower.unwrap_or(f64::NEG_INFINITY);
            let hi = report.upper.unwrap_or(f64::INFINITY);
            lo <= dense + slack && dense <= hi + slack
        }
        Method::Fast => error <= report.half_width.unwrap_or(cfg.eps).max(cfg.eps),
        Method::Tree | Method::Ultra => error <= cfg.eps,
    };
    Ok(VerifyReport {
        method: cfg.method,
        n: a.n(),
        estimate: report.estimate,
        dense,
        error,
        eps: cfg.eps,
        lower: report.lower,
        upper: report.upper,
        pass,
        report,
    })
}

pub fn bench(a: &SymmetricSparse, cfg: &RunConfig) -> Result<BenchReport> {
    let mut runs = Vec::with_capacity(cfg.runs);
    for k in 0..cfg.runs as u64 {
        let mut opts = options(cfg);
        opts.seed = cfg.seed.wrapping_add(k);
        let start = Instant::now();
        let r = estimate(a, cfg.method, &opts)?;
        runs.push(BenchRun {
            seed: opts.seed,
            estimate: r.estimate,
            degraded: r.degraded,
            time_ms: start.elapsed().as_secs_f64() * 1e3,
        });
    }
    let mean_time_ms = runs.iter().map(|r| r.time_ms).sum::<f64>() / runs.len() as f64;
    Ok(BenchReport {
        method: cfg.method,
        n: a.n(),
        m: a.off_diagonal_count(),
        eps: cfg.eps,
        eta: cfg.eta,
        runs,
        mean_time_ms,
    })
}

fn json<T: Serialize>(value: &T) -> Result<String> {
    let mut s = serde_json::to_string_pretty(value)?;
    s.push('\n');
    Ok(s)
}

fn execute(cfg: &RunConfig) -> Result<Outcome> {
    cfg.validate()?;
    let a = load(&cfg.source, cfg.seed)?;
    match cfg.command {
        Command::Gen => Ok(Outcome {
            text: format_matrix_market(&a),
            exit_code: EXIT_OK,
        }),
        Command::Estimate | Command::Bounds => {
            let method = if cfg.command == Command::Bounds {
                Method::Bounds
            } else {
                cfg.method
            };
            let r = estimate(&a, method, &options(cfg))?;
            Ok(Outcome {
                text: json(&r)?,
                exit_code: if r.degraded { EXIT_DEGRADED } else { EXIT_OK },
            })
        }
        Command::Verify => {
            let v = verify(&a, cfg)?;
            let exit_code = if !v.pass {
                EXIT_VERIFY_FAILED
            } else if v.report.degraded {
                EXIT_DEGRADED
            } else {
                EXIT_OK
            };
            Ok(Outcome {
                text: json(&v)?,
                exit_code,
            })
        }
        Command::Bench => Ok(Outcome {
            text: json(&bench(&a, cfg)?)?,
            exit_code: EXIT_OK,
        }),
    }
}

/// Runs a command on a dedicated pool of `cfg.threads` workers.
pub fn run(cfg: &RunConfig) -> Result<Outcome> {
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(cfg.threads)
        .build()?;
    pool.install(|| execute(cfg))
}
