use thiserror::Error;

/// Errors shared across the crate.
///
/// Guard variants ([`Error::is_guard`]) are refusals of a stated precondition
/// rather than runtime failures; the CLI maps them to exit code 2.
#[derive(Debug, Error)]
pub enum Error {
    #[error("dimension mismatch: expected {expected}, got {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("coordinate {index} out of range for dimension {dim}")]
    CoordinateOutOfRange { index: usize, dim: usize },

    #[error("dimension {dim} exceeds the enumeration guard ({max})")]
    EnumerationTooLarge { dim: usize, max: usize },

    #[error("vertex set is empty")]
    EmptyVertexSet,

    #[error("min-norm solver did not converge within {iterations} iterations")]
    SolverStalled { iterations: usize },

    #[error("function is not monotone: {0}")]
    NotMonotone(String),

    #[error("np = {np} is at or below the loglog guard e^e")]
    NpBelowGuard { np: f64 },

    #[error("graph with n = {n} exceeds the enumeration guard {max} for k = {k}")]
    GraphTooLarge { n: usize, k: usize, max: usize },

    #[error("self-loop: vertex {0} paired with itself")]
    SelfLoop(usize),

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("no trial records")]
    EmptyRecords,

    #[error("malformed input: {0}")]
    Parse(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    /// True for precondition/guard refusals; the CLI exits with code 2 on these.
    pub fn is_guard(&self) -> bool {
        matches!(
            self,
            Error::EnumerationTooLarge { .. }
                | Error::NotMonotone(_)
                | Error::NpBelowGuard { .. }
                | Error::GraphTooLarge { .. }
                | Error::InvalidParameter(_)
        )
    }
}
