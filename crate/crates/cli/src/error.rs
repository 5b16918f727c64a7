use thiserror::Error;

/// CLI failures, each mapped onto a process exit code.
#[derive(Debug, Error)]
pub enum CliError {
    /// Bad flags or arguments (exit 1).
    #[error("{0}")]
    Usage(String),
    /// Unreadable or malformed input data (exit 2).
    #[error("{0}")]
    Data(String),
    /// Failure while fitting, benchmarking or writing output (exit 3).
    #[error("{0}")]
    Runtime(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Usage(_) => 1,
            CliError::Data(_) => 2,
            CliError::Runtime(_) => 3,
        }
    }
}

impl From<breathing_kmeans::Error> for CliError {
    fn from(e: breathing_kmeans::Error) -> Self {
        use breathing_kmeans::Error as E;
        match e {
            E::InvalidParameter { .. } => CliError::Usage(e.to_string()),
            E::TooManyCentroids { .. } | E::DimensionMismatch { .. } => {
                CliError::Data(e.to_string())
            }
            _ => CliError::Runtime(e.to_string()),
        }
    }
}

pub type CliResult<T> = std::result::Result<T, CliError>;
