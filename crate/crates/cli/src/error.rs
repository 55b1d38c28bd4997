use std::path::PathBuf;

use clustered_vandermonde::Error as CoreError;

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("config error: {0}")]
    Config(String),
    #[error("numerical failure: {0}")]
    Numeric(#[from] CoreError),
    #[error("suite failure: {0}")]
    Suite(String),
    #[error("i/o error on {path}: {source}")]
    Io { path: PathBuf, source: std::io::Error },
    #[error("csv error: {0}")]
    Csv(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Config(_) => 1,
            CliError::Numeric(e) => match e {
                CoreError::InvalidArgument(_)
                | CoreError::DegenerateCluster(_)
                | CoreError::InfeasibleLayout(_)
                | CoreError::OutOfRegime(_) => 1,
                _ => 2,
            },
            CliError::Suite(_) => 2,
            CliError::Io { .. } | CliError::Csv(_) => 3,
        }
    }

    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        CliError::Io { path: path.into(), source }
    }
}

pub type CliResult<T> = std::result::Result<T, CliError>;
