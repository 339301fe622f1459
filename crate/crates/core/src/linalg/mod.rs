//! Small dense complex linear algebra.
//!
//! Everything here is sized for the handful of qubits the gas experiments
//! need (dimension at most ~16): row-major storage, no blocking, no BLAS.

mod eigen;
mod hermitian;
mod matrix;
mod vector;

pub use eigen::SpectralDecomposition;
pub use hermitian::{HermitianMatrix, Keep};
pub use matrix::ComplexMatrix;
pub use vector::StateVector;

use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum LinalgError {
    #[error("matrix has no rows")]
    Empty,
    #[error("matrix is not square: row {row} has {len} entries, expected {dim}")]
    NonSquare { row: usize, len: usize, dim: usize },
    #[error("non-finite entry at ({row}, {col})")]
    NonFinite { row: usize, col: usize },
    #[error("matrix is not Hermitian (asymmetry {asymmetry:e})")]
    NotHermitian { asymmetry: f64 },
    #[error("dimension mismatch: {left} vs {right}")]
    DimMismatch { left: usize, right: usize },
    #[error("dimension {dim} does not factor as {d1}x{d2}")]
    DimFactorMismatch { dim: usize, d1: usize, d2: usize },
    #[error("Jacobi iteration did not converge within {sweeps} sweeps")]
    ConvergenceFailure { sweeps: usize },
    #[error("state vector is not normalized (norm {norm})")]
    NotNormalized { norm: f64 },
    #[error("zero vector cannot be normalized")]
    ZeroVector,
}

pub type Result<T> = std::result::Result<T, LinalgError>;
