//! Dense complex matrix algebra and Hermitian spectral calculus.

mod eigen;
mod matrix;

pub use eigen::{
    hermitian_eig, loewner_geq, psd_log, psd_power, HermitianEigen, EPS_SUPPORT, HERMITICITY_TOL,
};
pub use matrix::ComplexMatrix;

use thiserror::Error;

#[derive(Debug, Error)]
pub enum NumError {
    #[error("matrix is not square: {rows}x{cols}")]
    NotSquare { rows: usize, cols: usize },

    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("input is not Hermitian (entrywise asymmetry {asymmetry:.3e})")]
    NonHermitianInput { asymmetry: f64 },

    #[error("shape error: {0}")]
    ShapeError(String),
}
