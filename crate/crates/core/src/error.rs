use thiserror::Error;

/// Errors produced by the library.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("invalid tour: {0}")]
    InvalidTour(String),

    #[error("invalid cost matrix: {0}")]
    InvalidMatrix(String),

    #[error("size limit exceeded: n = {n}, {operation} supports at most {limit} cities")]
    SizeLimit {
        operation: &'static str,
        n: usize,
        limit: usize,
    },

    #[error("domain error: {0}")]
    Domain(String),

    #[error("precondition violated: {0}")]
    Precondition(String),

    /// A weighted operator sum annihilated the state.
    #[error("degenerate output: norm {norm:e} below threshold")]
    DegenerateOutput { norm: f64 },

    #[error("unresolvable singularity in decode system (condition {condition:e})")]
    UnresolvableSingularity { condition: f64 },

    #[error("traversal drift at step {step}: fidelity {fidelity}")]
    TraversalDrift { step: usize, fidelity: f64 },

    #[error("insufficient varied operators: {count} requested, at least {required} needed")]
    InsufficientCount { count: usize, required: usize },

    #[error("invalid parameters: {0}")]
    InvalidParams(String),

    #[error("parse error: {0}")]
    Parse(String),

    #[error("io error: {0}")]
    Io(String),
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}

impl From<serde_json::Error> for Error {
    fn from(e: serde_json::Error) -> Self {
        Error::Parse(e.to_string())
    }
}

pub type Result<T> = std::result::Result<T, Error>;
