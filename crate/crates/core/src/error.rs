use thiserror::Error;

/// Errors produced by the solver library.
#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum Error {
    /// Malformed or out-of-range input supplied by the caller.
    #[error("input error: {0}")]
    Input(String),

    /// A documented precondition of an operation does not hold.
    #[error("precondition violated: {0}")]
    Precondition(String),

    /// The problem instance exceeds the size an exhaustive routine accepts.
    #[error("capacity exceeded: {0}")]
    Capacity(String),

    /// An operation was invoked in the wrong state (e.g. before its prerequisite ran).
    #[error("state error: {0}")]
    State(String),

    /// A text file could not be parsed.
    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },

    /// An internal invariant failed. This always signals a bug.
    #[error("internal invariant violated: {0}")]
    Invariant(String),
}

impl Error {
    pub(crate) fn input(msg: impl Into<String>) -> Self {
        Error::Input(msg.into())
    }

    pub(crate) fn invariant(msg: impl Into<String>) -> Self {
        Error::Invariant(msg.into())
    }

    pub(crate) fn parse(line: usize, msg: impl Into<String>) -> Self {
        Error::Parse {
            line,
            message: msg.into(),
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
