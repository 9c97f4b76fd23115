use thiserror::Error;

/// Crate-wide error type.
#[derive(Debug, Error)]
pub enum Error {
    /// The `latdiag` text did not parse.
    #[error("parse error at line {line}: {msg}")]
    Parse { line: usize, msg: String },

    /// An operation was called on input violating its precondition.
    #[error("precondition violated: {0}")]
    Precondition(String),

    /// The diagram is structurally broken in a way an operation cannot
    /// tolerate (failed face tracing, inconsistent cover lists, ...).
    #[error("malformed diagram: {0}")]
    Malformed(String),

    /// A resource guard was exceeded.
    #[error("resource limit exceeded: {0}")]
    ResourceLimit(String),

    /// The normalization loop hit its circuit breaker. Reaching this on a
    /// valid slim semimodular diagram is a bug, not an expected outcome.
    #[error("normalization exceeded {steps} steps; non-termination suspected")]
    NonTermination { steps: usize },

    #[error("io error: {0}")]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    pub fn precondition(msg: impl Into<String>) -> Self {
        Error::Precondition(msg.into())
    }

    pub fn malformed(msg: impl Into<String>) -> Self {
        Error::Malformed(msg.into())
    }
}
