use thiserror::Error;

pub type Result<T> = std::result::Result<T, CoreError>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum CoreError {
    #[error("invalid field parameters: {0}")]
    InvalidParams(String),

    #[error("spinor is not normalized (norm = {norm})")]
    NotNormalized { norm: f64 },

    #[error("matrix is not Hermitian")]
    NonHermitian,

    #[error("degenerate input: (1 - K)^2 + R^2 = 0, minimum fidelity and t_min are undefined")]
    Degenerate,

    #[error("invalid time grid: {0}")]
    InvalidGrid(String),

    #[error("grid too coarse for parallel transport: overlap {overlap:.6} at index {index} is below {threshold}")]
    GridTooCoarse { index: usize, overlap: f64, threshold: f64 },

    #[error("invalid pulse schedule: {0}")]
    InvalidSchedule(String),

    #[error("invalid sweep grid: {0}")]
    InvalidSweep(String),

    #[error("quadrature did not converge on [{a}, {b}] (estimated error {error:e})")]
    QuadratureFailed { a: f64, b: f64, error: f64 },

    #[error("worker pool: {0}")]
    Pool(String),
}
