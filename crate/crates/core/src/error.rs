use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("matrix is not square ({rows}x{cols})")]
    NotSquare { rows: usize, cols: usize },

    #[error("matrix is not Hermitian (max asymmetry {0:e})")]
    NotHermitian(f64),

    #[error("matrix is not unitary (residual {0:e})")]
    NotUnitary(f64),

    #[error("non-finite matrix entry")]
    NonFinite,

    #[error("eigensolver did not converge after {0} sweeps")]
    NoConvergence(usize),

    #[error("invalid spectrum: {0}")]
    InvalidSpectrum(String),

    #[error("invalid partition: {0}")]
    InvalidPartition(String),

    #[error("parameter out of range: {0}")]
    OutOfRange(String),

    #[error("outside positivity region: {0}")]
    NotPositive(String),

    #[error("unsupported dimension {0}: only prime dimensions are supported")]
    UnsupportedDimension(usize),

    #[error("index out of range: {0}")]
    IndexOutOfRange(String),

    #[error("{0}")]
    Unsupported(String),
}

pub type Result<T> = std::result::Result<T, Error>;
