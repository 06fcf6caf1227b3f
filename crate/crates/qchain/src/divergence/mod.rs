//! Scalar divergences and entropies: classical Rényi, measured,
//! sandwiched, geometric, and max, with limit handling and support
//! conventions. All values are in bits.

mod classical;
pub(crate) mod measured;
mod order;
mod quantum_div;
mod value;

pub use classical::{classical_renyi, classical_renyi_entropy, Distribution};
pub use measured::{measured, MeasuredOpts, MeasuredResult};
pub use order::{RenyiOrder, NEAR_ONE_GUARD};
pub use quantum_div::{geometric, renyi_entropy, sandwiched, DivKind};
pub use value::{DivDiagnostics, DivValue};

use thiserror::Error;

#[derive(Debug, Error)]
pub enum DivergenceError {
    #[error("alphabet sizes differ: {left} vs {right}")]
    AlphabetMismatch { left: usize, right: usize },

    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("order {0} is within 1e-4 of 1; use the explicit order tag \"1\"")]
    NearOneOrder(f64),

    #[error("invalid Rényi order {0}; orders must be in (0, ∞]")]
    InvalidOrder(f64),

    #[error("cannot parse Rényi order from {0:?}")]
    UnparsableOrder(String),

    #[error("invalid distribution: {0}")]
    BadDistribution(String),

    #[error("invalid options: {0}")]
    BadOptions(String),

    #[error(transparent)]
    Num(#[from] crate::numkernel::NumError),
}
