use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("matrix is not symmetric (max asymmetry {asymmetry:e})")]
    NotSymmetric { asymmetry: f64 },

    #[error("matrix is not orthogonal (max deviation of QᵀQ from I is {deviation:e})")]
    NotOrthogonal { deviation: f64 },

    #[error("non-finite entry in input")]
    NonFinite,

    #[error("Jacobi iteration did not converge (off-diagonal residual {residual:e})")]
    SpectralNonConvergence { residual: f64 },

    #[error("precondition violated: {0}")]
    Precondition(String),

    #[error("input is not in reduced form: {0}")]
    NotReduced(String),

    #[error("invalid multi-index {index:?} for ambient dimension {dim}")]
    InvalidMultiIndex { index: Vec<usize>, dim: usize },
}
