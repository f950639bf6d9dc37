use alloc::string::String;

use crate::matrix::SymMatrix;

pub type Result<T> = core::result::Result<T, Error>;

#[derive(Debug, Clone, thiserror::Error)]
pub enum Error {
    #[error("dimension mismatch: expected {expected:?}, found {found:?}")]
    DimensionMismatch {
        expected: (usize, usize),
        found: (usize, usize),
    },

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("non-finite entry at ({row}, {col})")]
    NonFinite { row: usize, col: usize },

    #[error("matrix is numerically rank deficient at column {column}")]
    RankDeficient { column: usize },

    #[error("{routine} did not converge within {iterations} iterations")]
    NoConvergence {
        routine: &'static str,
        iterations: usize,
    },

    #[error("singular linear system (pivot {pivot:e})")]
    Singular { pivot: f64 },

    #[error("Lyapunov operator is numerically singular (pivot {pivot:e})")]
    SingularLyapunov { pivot: f64 },

    #[error("point is off the Stiefel manifold: ‖XᵀX - I‖_F = {residual:e}")]
    NotOnManifold { residual: f64 },

    #[error("matrix is not tangent at the base point: ‖Xᵀη + ηᵀX‖_F = {residual:e}")]
    NotTangent { residual: f64 },

    #[error("tangent vector is based at a different point")]
    BaseMismatch,

    #[error("inverse retraction failed: {0}")]
    InverseRetraction(String),

    #[error("column {column} has zero variance")]
    ZeroVariance { column: usize },

    #[error("semi-smooth Newton stopped after {iterations} iterations with ‖Ψ‖_F = {residual:e}")]
    SsnNotConverged {
        iterations: usize,
        residual: f64,
        best_dual: SymMatrix,
    },

    #[error("line search exceeded {halvings} halvings")]
    LineSearch { halvings: usize },
}
