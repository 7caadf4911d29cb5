use serde::Serialize;
use thiserror::Error;

use bloch_tsp_core::Error as CoreError;

/// Exit status for malformed or invalid input.
pub const EXIT_INVALID: i32 = 2;
/// Exit status when an instance exceeds a documented size limit.
pub const EXIT_SIZE_LIMIT: i32 = 3;
/// Exit status for every other failure.
pub const EXIT_FAILURE: i32 = 1;

#[derive(Debug, Error)]
pub enum CliError {
    #[error(transparent)]
    Core(#[from] CoreError),

    #[error("{0}")]
    Usage(String),

    #[error("io error on {path}: {message}")]
    Io { path: String, message: String },
}

pub type Result<T> = std::result::Result<T, CliError>;

#[derive(Debug, Serialize)]
struct ErrorBody<'a> {
    error: &'a str,
    message: String,
    exit_code: i32,
}

impl CliError {
    pub fn io(path: impl AsRef<std::path::Path>, e: impl std::fmt::Display) -> Self {
        CliError::Io {
            path: path.as_ref().display().to_string(),
            message: e.to_string(),
        }
    }

    pub fn kind(&self) -> &'static str {
        match self {
            CliError::Usage(_) => "usage",
            CliError::Io { .. } => "io",
            CliError::Core(e) => match e {
                CoreError::InvalidTour(_) => "invalid_tour",
                CoreError::InvalidMatrix(_) => "invalid_matrix",
                CoreError::SizeLimit { .. } => "size_limit",
                CoreError::Domain(_) => "domain",
                CoreError::Precondition(_) => "precondition",
                CoreError::DegenerateOutput { .. } => "degenerate_output",
                CoreError::UnresolvableSingularity { .. } => "unresolvable_singularity",
                CoreError::TraversalDrift { .. } => "traversal_drift",
                CoreError::InsufficientCount { .. } => "insufficient_count",
                CoreError::InvalidParams(_) => "invalid_params",
                CoreError::Parse(_) => "parse",
                CoreError::Io(_) => "io",
            },
        }
    }

    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Usage(_) => EXIT_INVALID,
            CliError::Io { .. } => EXIT_FAILURE,
            CliError::Core(e) => match e {
                CoreError::SizeLimit { .. } => EXIT_SIZE_LIMIT,
                CoreError::InvalidTour(_)
                | CoreError::InvalidMatrix(_)
                | CoreError::Precondition(_)
                | CoreError::InsufficientCount { .. }
                | CoreError::InvalidParams(_)
                | CoreError::Parse(_) => EXIT_INVALID,
                _ => EXIT_FAILURE,
            },
        }
    }

    /// One-line JSON object for stderr.
    pub fn to_json(&self) -> String {
        serde_json::to_string(&ErrorBody {
            error: self.kind(),
            message: self.to_string(),
            exit_code: self.exit_code(),
        })
        .expect("error body serializes")
    }
}
