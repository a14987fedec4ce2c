use thiserror::Error;

/// Errors raised by the numerical kernels.
///
/// Non-convergence of an iterative solver is never an error; it is reported
/// in-band on the corresponding result type.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("division by exact zero")]
    DivisionByZero,
    #[error("invalid parameter: {0}")]
    Parameter(String),
    #[error("domain error: {0}")]
    Domain(String),
    #[error("cannot parse number: {0}")]
    Parse(String),
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn param<T>(msg: impl Into<String>) -> Result<T> {
    Err(Error::Parameter(msg.into()))
}
