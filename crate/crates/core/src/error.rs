use thiserror::Error;

/// Errors raised by parsing, validation and surgery on embeddings.
#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum Error {
    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },

    #[error("invalid vertex label {0:?}")]
    BadLabel(String),

    #[error("duplicate vertex {0}")]
    DuplicateVertex(String),

    #[error("unknown vertex {0}")]
    UnknownVertex(String),

    #[error("no edge {0}")]
    UnknownEdge(String),

    #[error("invalid rotation system: {0}")]
    Invalid(String),

    #[error("operation would disconnect the graph")]
    Disconnected,

    #[error("precondition failed: {0}")]
    Precondition(String),

    #[error("invalid current graph: {0}")]
    Current(String),

    #[error("not snug: {0}")]
    NotSnug(String),

    #[error("checkpoint: {0}")]
    Checkpoint(String),

    #[error("internal invariant violated: {0}")]
    Internal(String),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;

impl Error {
    pub(crate) fn parse(line: usize, message: impl Into<String>) -> Self {
        Error::Parse { line, message: message.into() }
    }

    pub(crate) fn pre(message: impl Into<String>) -> Self {
        Error::Precondition(message.into())
    }
}
