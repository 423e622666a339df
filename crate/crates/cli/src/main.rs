use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use cli::{run, CliError, Command, GraphKind, RunConfig, Source, Weights, DEFAULT_DENSE_CAP};
use logdet_api::Method;

/// Log-determinants of symmetric diagonally dominant matrices.
#[derive(Parser)]
#[command(name = "sddlogdet", version)]
struct Cli {
    #[command(subcommand)]
    command: Sub,
}

#[derive(Subcommand)]
enum Sub {
    /// Estimate ln det(A) / n.
    Estimate(Common),
    /// Deterministic lower and upper bounds on ln det(A) / n.
    Bounds(Common),
    /// Compare an estimate with the dense value.
    Verify(Common),
    /// Write a generated matrix in Matrix Market format.
    Gen(Common),
    /// Time repeated estimates over consecutive seeds.
    Bench {
        #[command(flatten)]
        common: Common,
        #[arg(long, default_value_t = 5)]
        runs: usize,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum MethodArg {
    Tree,
    Ultra,
    Fast,
    Bounds,
}

impl From<MethodArg> for Method {
    fn from(m: MethodArg) -> Self {
        match m {
            MethodArg::Tree => Method::Tree,
            MethodArg::Ultra => Method::Ultra,
            MethodArg::Fast => Method::Fast,
            MethodArg::Bounds => Method::Bounds,
        }
    }
}

#[derive(Args)]
struct Common {
    /// Matrix Market file.
    #[arg(long, conflicts_with = "graph")]
    input: Option<PathBuf>,
    /// Generated input instead of a file: grid:WxH, torus:WxH,
    /// random-regular:N,D or tree:N.
    #[arg(long)]
    graph: Option<String>,
    /// unit or uniform:A,B.
    #[arg(long, default_value = "unit")]
    weights: String,
    /// Diagonal shift added to the generated Laplacian.
    #[arg(long, default_value_t = 1.0)]
    shift: f64,
    #[arg(long, value_enum, default_value = "ultra")]
    method: MethodArg,
    #[arg(long, default_value_t = 0.1)]
    eps: f64,
    #[arg(long, default_value_t = 0.1)]
    eta: f64,
    #[arg(long, default_value_t = 42)]
    seed: u64,
    /// Output file (stdout if absent).
    #[arg(long)]
    out: Option<PathBuf>,
    /// Worker threads (0 = all cores).
    #[arg(long, default_value_t = 0)]
    threads: usize,
    /// Largest n the dense check in `verify` will accept.
    #[arg(long, default_value_t = DEFAULT_DENSE_CAP)]
    dense_cap: usize,
}

fn config(command: Command, c: Common, runs: usize) -> Result<RunConfig, CliError> {
    let source = match (c.input, c.graph) {
        (Some(p), None) => Source::File(p),
        (None, Some(g)) => Source::Generated {
            kind: g.parse::<GraphKind>()?,
            weights: c.weights.parse::<Weights>()?,
            shift: c.shift,
        },
        _ => {
            return Err(CliError::InvalidParameter(
                "exactly one of --input and --graph is required".into(),
            ))
        }
    };
    let mut cfg = RunConfig::new(command, source);
    cfg.method = c.method.into();
    cfg.eps = c.eps;
    cfg.eta = c.eta;
    cfg.seed = c.seed;
    cfg.output = c.out;
    cfg.threads = c.threads;
    cfg.dense_cap = c.dense_cap;
    cfg.runs = runs;
    Ok(cfg)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let cfg = match cli.command {
        Sub::Estimate(c) => config(Command::Estimate, c, 1),
        Sub::Bounds(c) => config(Command::Bounds, c, 1),
        Sub::Verify(c) => config(Command::Verify, c, 1),
        Sub::Gen(c) => config(Command::Gen, c, 1),
        Sub::Bench { common, runs } => config(Command::Bench, common, runs),
    };
    let result = cfg.and_then(|cfg| {
        let outcome = run(&cfg)?;
        match &cfg.output {
            Some(p) => std::fs::write(p, &outcome.text).map_err(|source| CliError::Io {
                path: p.display().to_string(),
                source,
            })?,
            None => {
                let _ = std::io::stdout().write_all(outcome.text.as_bytes());
            }
        }
        Ok(outcome.exit_code)
    });
    match result {
        Ok(code) => ExitCode::from(code as u8),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
