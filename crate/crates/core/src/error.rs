use thiserror::Error;

/// Errors raised across the library.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("rank mismatch: {left} vs {right}")]
    RankMismatch { left: usize, right: usize },

    #[error("capability missing: {0}")]
    Capability(String),

    #[error("vanishing denominator at point {point}, n = {n}")]
    DivisionDegeneracy { point: String, n: usize },

    #[error("cocycle audit failed: {0}")]
    CocycleAudit(String),

    #[error("point outside action domain: {0}")]
    Domain(String),

    #[error("unknown action `{0}`")]
    UnknownAction(String),

    #[error("degenerate boundary pair: {0}")]
    DegeneratePair(String),

    #[error("config error: {0}")]
    Config(String),

    #[error("parse error: {0}")]
    Parse(String),

    #[error("io error: {0}")]
    Io(String),
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}

pub type Result<T, E = Error> = std::result::Result<T, E>;

pub(crate) fn invalid(msg: impl Into<String>) -> Error {
    Error::InvalidArgument(msg.into())
}
