//! Error types shared by all modules.

/// Crate-wide error type.
#[derive(Debug, thiserror::Error)]
pub enum Error {
    /// A text input could not be parsed.
    #[error("parse error at line {line}: {msg}")]
    Parse { line: usize, msg: String },

    /// An input violated a documented precondition.
    #[error("validation error: {0}")]
    Validation(String),

    /// A vertex id fell outside the graph.
    #[error("vertex {vertex} out of range for a graph with {n_vertices} vertices")]
    VertexRange { vertex: u64, n_vertices: usize },

    /// A parameter code is not in the registry.
    #[error("unknown parameter code '{0}'")]
    UnknownCode(String),

    /// An argument was outside the mathematical domain of an operation.
    #[error("domain error: {0}")]
    Domain(String),

    /// An iterative numerical routine failed to converge.
    #[error("numeric error: {0}")]
    Numeric(String),

    /// An internal contract between modules was violated.
    #[error("contract violation: {0}")]
    Contract(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
