use std::path::PathBuf;

use thiserror::Error;

/// Process exit codes.
pub mod exit {
    pub const OK: i32 = 0;
    pub const USAGE: i32 = 1;
    pub const DATA: i32 = 2;
    pub const NUMERICAL: i32 = 3;
}

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("{0}")]
    Data(String),
    #[error("{0}")]
    Config(String),
    #[error(transparent)]
    Core(#[from] mixjitter::Error),
    #[error("verification failed: {0}")]
    Verification(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        use mixjitter::Error as E;
        match self {
            CliError::Usage(_) | CliError::Config(_) => exit::USAGE,
            CliError::Io { .. } | CliError::Data(_) => exit::DATA,
            CliError::Verification(_) => exit::NUMERICAL,
            CliError::Core(e) => match e {
                E::InvalidParameter(_) => exit::USAGE,
                E::Schema(_) | E::DegenerateColumn(_) | E::InsufficientData { .. } | E::DimensionMismatch { .. } => {
                    exit::DATA
                }
                E::NoLocalData { .. }
                | E::NumericalFailure { .. }
                | E::UndefinedConditional
                | E::QuantileSearch { .. } => exit::NUMERICAL,
            },
        }
    }

    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        CliError::Io {
            path: path.into(),
            source,
        }
    }
}

pub type CliResult<T> = Result<T, CliError>;
