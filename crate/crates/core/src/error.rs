use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum Error {
    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    /// The requested pivot entry of a rank-one term is zero.
    #[error("invalid pivot: {0}")]
    InvalidPivot(String),

    /// Parameters for which a construction does not produce a valid distribution.
    #[error("infeasible parameters: {0}")]
    InfeasibleParameters(String),

    #[error("parse error: {0}")]
    Parse(String),
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn invalid(msg: impl Into<String>) -> Error {
    Error::InvalidArgument(msg.into())
}
