use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid dimension: n = {n}, d = {d} (both must be at least 1)")]
    InvalidDimension { n: usize, d: usize },

    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("size mismatch: expected a {expected}x{expected} matrix, got {got}x{got}")]
    SizeMismatch { expected: usize, got: usize },

    #[error("matrix is not positive definite (pivot {pivot} failed)")]
    NotPositiveDefinite { pivot: usize },

    #[error("no candidate point lies in the design space")]
    EmptyCandidateSet,

    #[error("too few candidates: {got} points for a model with {needed} coefficients")]
    TooFewCandidates { got: usize, needed: usize },

    #[error("degenerate design: information matrix is not positive definite (pivot {pivot})")]
    DegenerateDesign { pivot: usize },

    #[error("invalid weights: {0}")]
    InvalidWeights(String),

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("certificate does not describe an ellipsoid: {0}")]
    NotAnEllipsoid(String),

    #[error("operation requires degree {expected}, got {got}")]
    WrongDegree { expected: usize, got: usize },
}

impl Error {
    /// Maps a factorization failure onto the design-level error.
    pub(crate) fn into_degenerate(self) -> Error {
        match self {
            Error::NotPositiveDefinite { pivot } => Error::DegenerateDesign { pivot },
            other => other,
        }
    }
}
