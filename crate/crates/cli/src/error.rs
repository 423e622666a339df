use logdet_api::LogdetError;
use sparse_core::SparseError;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },
    #[error("entry ({row}, {col}) has no matching ({col}, {row}) entry")]
    AsymmetricInput { row: usize, col: usize },
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
    #[error("n = {n} exceeds the dense oracle cap {cap}")]
    OracleTooLarge { n: usize, cap: usize },
    #[error("{path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
    #[error(transparent)]
    Logdet(#[from] LogdetError),
    #[error(transparent)]
    Sparse(#[from] SparseError),
    #[error(transparent)]
    Json(#[from] serde_json::Error),
    #[error("thread pool: {0}")]
    ThreadPool(#[from] rayon::ThreadPoolBuildError),
}

impl CliError {
    pub(crate) fn parse(line: usize, message: impl Into<String>) -> Self {
        Self::Parse {
            line,
            message: message.into(),
        }
    }

    /// Process exit code: 3 for bad input, 1 for anything else.
    pub fn exit_code(&self) -> i32 {
        match self {
            Self::Parse { .. }
            | Self::AsymmetricInput { .. }
            | Self::InvalidParameter(_)
            | Self::OracleTooLarge { .. }
            | Self::Io { .. }
            | Self::Sparse(_) => 3,
            Self::Logdet(
                LogdetError::NotSdd { .. }
                | LogdetError::Singular { .. }
                | LogdetError::InvalidParameter(_)
                | LogdetError::Sparse(_),
            ) => 3,
            _ => 1,
        }
    }
}

pub type Result<T> = std::result::Result<T, CliError>;
