use thiserror::Error;

/// Errors raised across the crate.
///
/// The split between [`Error::ResourceLimit`] and everything else matters to
/// the command-line front end: resource exhaustion maps to exit code 3 while
/// malformed input maps to exit code 2.
#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum Error {
    #[error("shape mismatch: {0}")]
    ShapeMismatch(String),

    #[error("axis {axis} out of range for a tensor with {rank} axes")]
    AxisOutOfRange { axis: usize, rank: usize },

    #[error("invalid axis list: {0}")]
    InvalidAxes(String),

    #[error("invalid tensor: {0}")]
    InvalidTensor(String),

    #[error("invalid grid: {0}")]
    InvalidGrid(String),

    #[error("grid dimension mismatch: {left} vs {right}")]
    DimensionMismatch { left: usize, right: usize },

    #[error("invalid tensor family: {0}")]
    InvalidFamily(String),

    #[error("invalid assignment: {0}")]
    InvalidAssignment(String),

    #[error("vector length {got} does not match ambient dimension {expected}")]
    LengthMismatch { expected: usize, got: usize },

    #[error("matrix is not square ({rows}x{cols})")]
    NotSquare { rows: usize, cols: usize },

    #[error("invalid recipe: {0}")]
    InvalidRecipe(String),

    #[error("the rational engine needs exact rational entries; this family stores floats")]
    NotExact,

    #[error("grid {0} is not an injective region for this family")]
    NotInjective(String),

    #[error("operation requires n = 1, got n = {0}")]
    NotOneDimensional(usize),

    #[error("resource limit exceeded: {0}")]
    ResourceLimit(String),

    #[error("parse error: {0}")]
    Parse(String),
}

pub type Result<T> = std::result::Result<T, Error>;
