use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("matrix is not unitary (max deviation {deviation:.3e})")]
    NonUnitaryInput { deviation: f64 },

    #[error("eigensolver did not converge after {iterations} iterations")]
    ConvergenceFailure { iterations: usize },

    #[error("matrix of shape {rows}x{cols} is not square with a perfect-square dimension")]
    NotSquareDimension { rows: usize, cols: usize },

    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error(
        "degenerate dispersion: sin^2(gamma) = {sin2_gamma:.3e} is too small for the closed form"
    )]
    DegenerateDispersion { sin2_gamma: f64 },

    #[error("degenerate coin: {0}")]
    DegenerateCoin(String),

    #[error("normalization error: {0}")]
    Normalization(String),

    #[error("invalid density matrix: {0}")]
    InvalidDensityMatrix(String),

    #[error("invalid walk: {0}")]
    InvalidWalk(String),

    #[error("invalid initial state: {0}")]
    InvalidState(String),

    #[error("numerical failure: {0}")]
    Numerical(String),

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("parse error: {0}")]
    Parse(String),
}
