use thiserror::Error;

/// Errors raised by the library.
#[derive(Debug, Error)]
pub enum Error {
    /// Caller supplied arguments outside an operation's domain of definition.
    #[error("invalid input: {0}")]
    InvalidInput(String),

    /// The inputs are well-formed but the quantity is undefined for them
    /// (for example a rate for a degree-regular hypergraph).
    #[error("domain error: {0}")]
    Domain(String),

    #[error("parse error at line {line}, column {column}: {message}")]
    Parse {
        line: usize,
        column: usize,
        message: String,
    },

    /// An exhaustive computation would exceed the configured work limit.
    #[error("refusing to enumerate {required} subsets (limit {limit})")]
    ResourceLimit { required: u128, limit: u128 },

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;

pub(crate) fn invalid<T>(msg: impl Into<String>) -> Result<T> {
    Err(Error::InvalidInput(msg.into()))
}
