//! Density operators with cached spectral decompositions.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::numkernel::{hermitian_eig, ComplexMatrix, HermitianEigen, EPS_SUPPORT};

use super::QuantumError;

pub const STATE_TOL: f64 = 1e-10;

/// A quantum state: positive semidefinite, unit-trace complex matrix.
///
/// The eigendecomposition is computed once at construction, so values are
/// immutable afterwards and safe to share across threads.
#[derive(Debug, Clone)]
pub struct DensityOperator {
    matrix: ComplexMatrix,
    dim: usize,
    eigen: HermitianEigen,
}

impl DensityOperator {
    /// Validate and canonicalize a candidate density matrix.
    ///
    /// Requires Hermiticity within 1e−10 entrywise, λ_min ≥ −1e−10, and
    /// |Tr−1| ≤ 1e−10. The stored matrix is symmetrized and rescaled to
    /// unit trace to keep round-off from accumulating downstream.
    pub fn new(matrix: ComplexMatrix) -> Result<Self, QuantumError> {
        if !matrix.is_square() {
            return Err(QuantumError::NotSquare {
                rows: matrix.rows(),
                cols: matrix.cols(),
            });
        }
        let defect = matrix.hermiticity_defect();
        if defect > STATE_TOL {
            return Err(QuantumError::NotHermitian { asymmetry: defect });
        }
        let tr = matrix.trace();
        if (tr.re - 1.0).abs() > STATE_TOL || tr.im.abs() > STATE_TOL {
            return Err(QuantumError::InvalidTrace { trace: tr.re });
        }
        let canonical = matrix.hermitize().scale_re(1.0 / tr.re);
        let eigen = hermitian_eig(&canonical)?;
        if eigen.min_eigenvalue() < -STATE_TOL {
            return Err(QuantumError::NotPositive {
                min_eigenvalue: eigen.min_eigenvalue(),
            });
        }
        let dim = canonical.rows();
        Ok(Self {
            matrix: canonical,
            dim,
            eigen,
        })
    }

    /// Pure state |v⟩⟨v| from a (not necessarily normalized) vector.
    pub fn pure_state(v: &[Complex64]) -> Result<Self, QuantumError> {
        let norm_sq: f64 = v.iter().map(|z| z.norm_sqr()).sum();
        if norm_sq <= 0.0 {
            return Err(QuantumError::InvalidDimension(
                "zero vector cannot define a pure state".into(),
            ));
        }
        let scaled: Vec<Complex64> = v.iter().map(|z| z / norm_sq.sqrt()).collect();
        Self::new(ComplexMatrix::outer(&scaled))
    }

    /// Computational basis state |k⟩⟨k|.
    pub fn basis_state(dim: usize, k: usize) -> Result<Self, QuantumError> {
        if k >= dim {
            return Err(QuantumError::InvalidDimension(format!(
                "basis index {k} out of range for dim {dim}"
            )));
        }
        let mut v = vec![Complex64::new(0.0, 0.0); dim];
        v[k] = Complex64::new(1.0, 0.0);
        Self::pure_state(&v)
    }

    /// Maximally mixed state I/d.
    pub fn maximally_mixed(dim: usize) -> Self {
        let m = ComplexMatrix::identity(dim).scale_re(1.0 / dim as f64);
        Self::new(m).expect("I/d is a valid state")
    }

    pub fn matrix(&self) -> &ComplexMatrix {
        &self.matrix
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn eigen(&self) -> &HermitianEigen {
        &self.eigen
    }

    /// Eigenvalues ascending, tiny negatives clamped to zero.
    pub fn eigenvalues(&self) -> Vec<f64> {
        self.eigen
            .eigenvalues
            .iter()
            .map(|&l| if l > 0.0 { l } else { 0.0 })
            .collect()
    }

    /// Projector onto the support (eigenvalues above the relative cutoff).
    pub fn support_projector(&self) -> ComplexMatrix {
        self.eigen.support_projector()
    }

    /// Mass of `other` outside the support of `self`: Tr[(I − Π_supp) other].
    pub fn mass_outside_support(&self, other: &DensityOperator) -> f64 {
        let pi = self.support_projector();
        let inside = pi.inner_trace(other.matrix());
        (1.0 - inside).max(0.0)
    }

    /// Numeric support-domination test: other ≪ self.
    pub fn dominates(&self, other: &DensityOperator) -> bool {
        self.mass_outside_support(other) <= EPS_SUPPORT
    }

    pub fn purity(&self) -> f64 {
        self.matrix.inner_trace(&self.matrix)
    }

    /// Kronecker product with another state.
    pub fn tensor(&self, other: &DensityOperator) -> Result<Self, QuantumError> {
        Self::new(self.matrix.kron(other.matrix()))
    }
}

/// JSON wire form: `{"dim": d, "matrix": {...}}`.
#[derive(Serialize, Deserialize)]
struct StateJson {
    dim: usize,
    matrix: ComplexMatrix,
}

impl Serialize for DensityOperator {
    fn serialize<S: serde::Serializer>(&self, ser: S) -> Result<S::Ok, S::Error> {
        StateJson {
            dim: self.dim,
            matrix: self.matrix.clone(),
        }
        .serialize(ser)
    }
}

impl<'de> Deserialize<'de> for DensityOperator {
    fn deserialize<D: serde::Deserializer<'de>>(de: D) -> Result<Self, D::Error> {
        use serde::de::Error;
        let raw = StateJson::deserialize(de)?;
        if raw.matrix.rows() != raw.dim {
            return Err(D::Error::custom(format!(
                "declared dim {} does not match matrix rows {}",
                raw.dim,
                raw.matrix.rows()
            )));
        }
        DensityOperator::new(raw.matrix).map_err(D::Error::custom)
    }
}
