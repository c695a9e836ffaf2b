use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    /// A parameter lies outside the range the construction accepts.
    #[error("invalid parameter: {0}")]
    Parameter(String),
    /// The input does not satisfy an operation's precondition.
    #[error("domain error: {0}")]
    Domain(String),
    /// The requested evaluation lies beyond what the finite horizon represents.
    #[error("range error: {0}")]
    Range(String),
    #[error("parse error at line {line}: {message}")]
    Parse { line: usize, message: String },
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;

pub(crate) fn domain<T>(msg: impl Into<String>) -> Result<T> {
    Err(Error::Domain(msg.into()))
}

pub(crate) fn parameter<T>(msg: impl Into<String>) -> Result<T> {
    Err(Error::Parameter(msg.into()))
}
