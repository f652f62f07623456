use std::io;
use std::path::PathBuf;

use thiserror::Error;

/// Process exit codes.
pub mod exit {
    pub const SUCCESS: i32 = 0;
    pub const RUNTIME: i32 = 1;
    pub const ARGUMENT: i32 = 2;
    pub const PARSE: i32 = 3;
    pub const DEGENERATE: i32 = 4;
    pub const INSUFFICIENT_STATISTICS: i32 = 5;
}

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{}:{line}: {msg}", path.display())]
    Parse { path: PathBuf, line: usize, msg: String },
    #[error("{0}")]
    Argument(String),
    #[error("{}: {source}", path.display())]
    Io {
        path: PathBuf,
        #[source]
        source: io::Error,
    },
    #[error("{0}")]
    Csv(#[from] csv::Error),
    #[error(transparent)]
    Compute(#[from] nlradius::Error),
}

impl CliError {
    pub fn io(path: impl Into<PathBuf>, source: io::Error) -> Self {
        CliError::Io {
            path: path.into(),
            source,
        }
    }

    pub fn exit_code(&self) -> i32 {
        use nlradius::Error as E;
        match self {
            CliError::Parse { .. } => exit::PARSE,
            CliError::Argument(_) => exit::ARGUMENT,
            CliError::Io { source, .. } if source.kind() == io::ErrorKind::NotFound => exit::ARGUMENT,
            CliError::Io { .. } | CliError::Csv(_) => exit::RUNTIME,
            CliError::Compute(e) => match e {
                E::InvalidArgument(_) | E::DimensionMismatch { .. } => exit::ARGUMENT,
                E::Degenerate(_) => exit::DEGENERATE,
                E::SeriesTooShort { .. } | E::InsufficientData(_) | E::InsufficientStatistics { .. } => {
                    exit::INSUFFICIENT_STATISTICS
                }
                E::Divergence { .. } => exit::RUNTIME,
            },
        }
    }

    /// Short stable tag written into per-run error columns.
    pub fn tag(&self) -> &'static str {
        match self.exit_code() {
            exit::PARSE => "parse",
            exit::ARGUMENT => "argument",
            exit::DEGENERATE => "degenerate",
            exit::INSUFFICIENT_STATISTICS => "insufficient-statistics",
            _ => "runtime",
        }
    }
}

pub type CliResult<T> = Result<T, CliError>;
