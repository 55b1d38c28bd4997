use thiserror::Error;

/// Failure modes shared by every module of the crate.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
    #[error("rank-deficient matrix: {0}")]
    RankDeficient(String),
    #[error("degenerate cluster: {0}")]
    DegenerateCluster(String),
    #[error("infeasible layout: {0}")]
    InfeasibleLayout(String),
    #[error("ill-conditioned input: {0}")]
    IllConditioned(String),
    #[error("precondition violated: {0}")]
    Precondition(String),
    #[error("outside validity regime: {0}")]
    OutOfRegime(String),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;

pub(crate) fn invalid(msg: impl Into<String>) -> Error {
    Error::InvalidArgument(msg.into())
}
