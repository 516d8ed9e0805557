use thiserror::Error;

/// Errors raised when an operation's preconditions are not met.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    /// A caller-supplied value violates the operation's contract.
    #[error("contract violation: {0}")]
    Contract(String),
    /// A registry lookup used a key that is not registered.
    #[error("unknown registry key: {0}")]
    UnknownKey(String),
    /// A textual input (body string, registry record, report) could not be parsed.
    #[error("parse error: {0}")]
    Parse(String),
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn contract(msg: impl Into<String>) -> Error {
    Error::Contract(msg.into())
}
