//! Matrix Market I/O, test-matrix generators and the command runner
//! behind the `sddlogdet` binary.

pub mod config;
pub mod error;
pub mod generate;
pub mod mm;
pub mod run;

pub use config::{Command, RunConfig, Source, DEFAULT_DENSE_CAP};
pub use error::{CliError, Result};
pub use generate::{generate, generate_graph, GraphKind, Weights};
pub use mm::{format_matrix_market, parse_matrix_market, read_matrix_market, write_matrix_market};
pub use run::{
    bench, estimate, load, run, verify, BenchReport, BenchRun, Outcome, VerifyReport, BOUNDS_SLACK,
    EXIT_DEGRADED, EXIT_INVALID, EXIT_OK, EXIT_VERIFY_FAILED,
};
