use thiserror::Error;

/// Errors raised by the kernel laboratory.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    /// Operand shapes do not satisfy an operation's contract.
    #[error("contract violation: {0}")]
    ContractViolation(String),
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
    /// A dense materialization or allocation would exceed the configured cap.
    #[error("size guard exceeded: {0}")]
    SizeGuard(String),
    /// A value cannot be represented in the requested format.
    #[error("value out of range: {0}")]
    Range(String),
    #[error("singular matrix: {0}")]
    Singular(String),
    #[error("undefined result: {0}")]
    Undefined(String),
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn contract(msg: impl Into<String>) -> Error {
    Error::ContractViolation(msg.into())
}

pub(crate) fn invalid(msg: impl Into<String>) -> Error {
    Error::InvalidArgument(msg.into())
}
