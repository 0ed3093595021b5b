use thiserror::Error;

/// Errors raised by the solvers.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("invalid system specification: {0}")]
    InvalidSpec(String),

    #[error("Hilbert dimension {dim} exceeds the configured cap {cap}")]
    DimensionCap { dim: usize, cap: usize },

    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),

    #[error("eigendecomposition failed: {0}")]
    EigenSolve(String),

    #[error("no steady state found: the Liouvillian has an empty kernel")]
    NoKernel,

    #[error("singular linear solve: {0}")]
    SingularSolve(String),

    #[error("non-finite evolution time {0}")]
    NonFiniteTime(f64),

    #[error("quantity undefined: {0}")]
    Undefined(String),

    #[error("not applicable: {0}")]
    NotApplicable(String),

    #[error("integral not converged: achieved tail bound {bound:e}")]
    NotConverged { bound: f64 },

    #[error("invalid density matrix: {0}")]
    InvalidState(String),
}

pub type Result<T> = std::result::Result<T, Error>;
