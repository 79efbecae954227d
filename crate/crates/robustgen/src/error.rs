use std::path::PathBuf;

use robustgen_core::Error as CoreError;

/// Process exit codes.
pub const EXIT_OK: i32 = 0;
pub const EXIT_USAGE: i32 = 2;
pub const EXIT_NUMERIC: i32 = 3;
pub const EXIT_IO: i32 = 4;

#[derive(Debug, thiserror::Error)]
pub enum AppError {
    #[error("usage error: {0}")]
    Usage(String),

    #[error("config error: {0}")]
    Config(String),

    #[error("numeric failure in {family} cell eps={epsilon} n={n} replication={replication}: {source}")]
    Numeric {
        family: &'static str,
        epsilon: f64,
        n: u64,
        replication: usize,
        source: CoreError,
    },

    #[error("numeric failure: {0}")]
    Analysis(CoreError),

    #[error("{}: {source}", path.display())]
    Io { path: PathBuf, source: std::io::Error },

    #[error("{0} verification check(s) failed")]
    Verification(usize),
}

impl AppError {
    pub fn exit_code(&self) -> i32 {
        match self {
            AppError::Usage(_) | AppError::Config(_) => EXIT_USAGE,
            AppError::Numeric { .. } | AppError::Analysis(_) | AppError::Verification(_) => EXIT_NUMERIC,
            AppError::Io { .. } => EXIT_IO,
        }
    }

    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        AppError::Io { path: path.into(), source }
    }
}
