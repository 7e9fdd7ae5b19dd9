use std::path::PathBuf;

/// Failures of the command-line layer, grouped by exit code.
#[derive(Debug, thiserror::Error)]
pub enum PairspecError {
    #[error("invalid input: {0}")]
    Input(String),
    #[error(transparent)]
    Core(#[from] pairspec_core::Error),
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("writing output: {0}")]
    Output(#[from] std::io::Error),
    #[error("{path}: {source}")]
    Json {
        path: PathBuf,
        #[source]
        source: serde_json::Error,
    },
}

pub type Result<T, E = PairspecError> = std::result::Result<T, E>;

/// Exit status of a verification run that completed but failed a check.
pub const EXIT_VERIFICATION_FAILED: i32 = 1;

impl PairspecError {
    /// Process exit code: 2 for bad input, 3 for solver failures.
    pub fn exit_code(&self) -> i32 {
        use pairspec_core::Error as E;
        match self {
            PairspecError::Input(_) | PairspecError::Json { .. } | PairspecError::Io { .. } => 2,
            PairspecError::Core(
                E::InvalidParameter(_)
                | E::NonConforming { .. }
                | E::Dimension(_)
                | E::ZeroVector
                | E::NotExchangeSymmetric,
            ) => 2,
            PairspecError::Core(_) | PairspecError::Output(_) => 3,
        }
    }
}
