use thiserror::Error;

/// Errors raised by the library. Mathematical check failures are reported
/// through verdict types, not through this enum.
#[derive(Debug, Error)]
pub enum Error {
    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("function is not proper: every value is +inf")]
    NotProper,

    #[error("-inf is not an admissible value (index {0})")]
    NegativeInfinity(usize),

    #[error("NaN value at index {0}")]
    NotANumber(usize),

    #[error("invalid grid: {0}")]
    InvalidGrid(String),

    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error("precondition violated: {0}")]
    Precondition(String),

    #[error("unsupported: {0}")]
    Unsupported(String),

    #[error("operator graph is empty")]
    EmptyGraph,

    #[error("infeasible start: h is +inf at every initialization probe")]
    InfeasibleStart,

    #[error("extracted set is not monotone: points {0} and {1} pair to {2:e}")]
    NotMonotone(usize, usize, f64),

    #[error("parse error at line {line}: {msg}")]
    Parse { line: usize, msg: String },

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn check_dim(expected: usize, found: usize) -> Result<()> {
    if expected == found {
        Ok(())
    } else {
        Err(Error::DimensionMismatch { expected, found })
    }
}
