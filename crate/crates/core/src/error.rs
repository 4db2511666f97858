use thiserror::Error;

/// Failures raised by the numerical routines.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid parameter: {0}")]
    InvalidParameter(&'static str),
    #[error("Gauss-Hermite node {index} of {points} did not converge")]
    QuadratureNoConvergence { index: usize, points: usize },
    #[error("quadrature budget exceeded: {requested} nodes per axis (limit {limit})")]
    BudgetExceeded { requested: usize, limit: usize },
    #[error("state has weight {weight:.3e} in the requested subspace")]
    DegenerateSubspace { weight: f64 },
    #[error("all diagonal coefficients vanish")]
    DegenerateDiagonal,
    #[error("correlation undefined: all four coincidence rates are zero")]
    UndefinedCorrelation,
    #[error("measurement set is not informationally complete (rank {rank} < {required})")]
    IncompleteMeasurements { rank: usize, required: usize },
    #[error("dimension mismatch: expected {expected}, got {actual}")]
    DimensionMismatch { expected: usize, actual: usize },
}

pub type Result<T> = core::result::Result<T, Error>;
