//! Quantum states, positive maps, pinching, and instance generation.

mod maps;
mod pinching;
pub mod random;
mod state;

pub use maps::PositiveMapRep;
pub use pinching::{
    joint_eigenbasis, measure, measurement_map_apply, pinch, pinch_with_tol, spectrum,
    SpectrumInfo, DEFAULT_CLUSTER_TOL,
};
pub use state::{DensityOperator, STATE_TOL};

use thiserror::Error;

use crate::numkernel::NumError;

/// Largest Hilbert-space dimension handled by tensor-power guards.
pub const MAX_TENSOR_DIM: usize = 64;

#[derive(Debug, Error)]
pub enum QuantumError {
    #[error("matrix is not square: {rows}x{cols}")]
    NotSquare { rows: usize, cols: usize },

    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("not Hermitian (entrywise asymmetry {asymmetry:.3e})")]
    NotHermitian { asymmetry: f64 },

    #[error("trace is not 1 (got {trace})")]
    InvalidTrace { trace: f64 },

    #[error("not positive semidefinite (min eigenvalue {min_eigenvalue:.3e})")]
    NotPositive { min_eigenvalue: f64 },

    #[error("inputs do not commute (‖[σ,τ]‖_F = {commutator:.3e})")]
    NonCommutingInputs { commutator: f64 },

    #[error("invalid dimension: {0}")]
    InvalidDimension(String),

    #[error("tensor power dimension {dim} exceeds the guard of {max}")]
    DimensionTooLarge { dim: usize, max: usize },

    #[error("map is not trace preserving")]
    NotTracePreserving,

    #[error("operation not supported for transpose-composed maps: {0}")]
    UnsupportedForTransposeMaps(String),

    #[error(transparent)]
    Num(#[from] NumError),

    #[error("invalid distribution: {0}")]
    BadDistribution(String),
}

impl From<crate::divergence::DivergenceError> for QuantumError {
    fn from(e: crate::divergence::DivergenceError) -> Self {
        QuantumError::BadDistribution(e.to_string())
    }
}

/// n-fold tensor power of a state, guarded at `MAX_TENSOR_DIM`.
pub fn state_tensor_power(rho: &DensityOperator, n: usize) -> Result<DensityOperator, QuantumError> {
    if n == 0 {
        return Err(QuantumError::InvalidDimension("tensor power requires n ≥ 1".into()));
    }
    let dim = rho.dim().checked_pow(n as u32).unwrap_or(usize::MAX);
    if dim > MAX_TENSOR_DIM {
        return Err(QuantumError::DimensionTooLarge {
            dim,
            max: MAX_TENSOR_DIM,
        });
    }
    let mut out = rho.clone();
    for _ in 1..n {
        out = out.tensor(rho)?;
    }
    Ok(out)
}

/// n-fold tensor power of a map, with the same dimension guard on the
/// input side.
pub fn map_tensor_power(map: &PositiveMapRep, n: usize) -> Result<PositiveMapRep, QuantumError> {
    let dim = map.dim_in().max(map.dim_out()).checked_pow(n as u32).unwrap_or(usize::MAX);
    if dim > MAX_TENSOR_DIM {
        return Err(QuantumError::DimensionTooLarge {
            dim,
            max: MAX_TENSOR_DIM,
        });
    }
    map.tensor_power(n)
}
