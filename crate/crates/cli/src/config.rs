use std::path::PathBuf;

use logdet_api::Method;

use crate::error::{CliError, Result};
use crate::generate::{GraphKind, Weights};

pub const DEFAULT_DENSE_CAP: usize = 2000;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Command {
    Estimate,
    Bounds,
    Verify,
    Gen,
    Bench,
}

/// Where the input matrix comes from.
#[derive(Debug, Clone, PartialEq)]
pub enum Source {
    File(PathBuf),
    Generated {
        kind: GraphKind,
        weights: Weights,
        shift: f64,
    },
}

#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub command: Command,
    pub source: Source,
    pub method: Method,
    pub eps: f64,
    pub eta: f64,
    pub seed: u64,
    pub output: Option<PathBuf>,
    pub dense_cap: usize,
    /// Worker threads; 0 picks the rayon default.
    pub threads: usize,
    /// Seeds per bench run.
    pub runs: usize,
}

impl RunConfig {
    pub fn new(command: Command, source: Source) -> Self {
        Self {
            command,
            source,
            method: Method::Ultra,
            eps: 0.1,
            eta: 0.1,
            seed: 42,
            output: None,
            dense_cap: DEFAULT_DENSE_CAP,
            threads: 0,
            runs: 5,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.eps > 0.0 && self.eps <= 10.0) {
            return Err(CliError::InvalidParameter(format!(
                "eps = {} must lie in (0, 10]",
                self.eps
            )));
        }
        if !(self.eta > 0.0 && self.eta < 1.0) {
            return Err(CliError::InvalidParameter(format!(
                "eta = {} must lie in (0, 1)",
                self.eta
            )));
        }
        if self.command == Command::Bench && self.runs == 0 {
            return Err(CliError::InvalidParameter(
                "bench needs at least one run".into(),
            ));
        }
        Ok(())
    }
}
