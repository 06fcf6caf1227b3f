//! Kraus-sum representations of positive maps.

use serde::{Deserialize, Serialize};

use crate::numkernel::{hermitian_eig, ComplexMatrix};

use super::state::DensityOperator;
use super::QuantumError;

const FLAG_TOL: f64 = 1e-9;

/// A positive map in Kraus form, X ↦ Σ K·T?(X)·K†, where T? is an
/// optional input transposition.
///
/// With `pre_transpose = false` the map is completely positive by
/// construction. With `pre_transpose = true` it is positive and trace
/// preserving whenever the Kraus part is, but in general not completely
/// positive; this is the construction-certified family of non-CP positive
/// maps shipped here. The trace-preserving/unital/CP flags are computed
/// once at construction.
#[derive(Debug, Clone)]
pub struct PositiveMapRep {
    kraus: Vec<ComplexMatrix>,
    pre_transpose: bool,
    dim_in: usize,
    dim_out: usize,
    trace_preserving: bool,
    unital: bool,
    completely_positive: bool,
}

impl PositiveMapRep {
    pub fn new(kraus: Vec<ComplexMatrix>, pre_transpose: bool) -> Result<Self, QuantumError> {
        let first = kraus.first().ok_or_else(|| {
            QuantumError::InvalidDimension("a map needs at least one Kraus operator".into())
        })?;
        let (dim_out, dim_in) = (first.rows(), first.cols());
        if dim_in == 0 || dim_out == 0 {
            return Err(QuantumError::InvalidDimension(
                "zero-dimensional Kraus operator".into(),
            ));
        }
        if kraus
            .iter()
            .any(|k| k.rows() != dim_out || k.cols() != dim_in)
        {
            return Err(QuantumError::InvalidDimension(
                "inconsistent Kraus operator shapes".into(),
            ));
        }
        let mut ktk = ComplexMatrix::zeros(dim_in, dim_in);
        let mut kkt = ComplexMatrix::zeros(dim_out, dim_out);
        for k in &kraus {
            ktk = ktk.add(&k.adjoint().matmul(k)?)?;
            kkt = kkt.add(&k.matmul(&k.adjoint())?)?;
        }
        let trace_preserving = ktk
            .sub(&ComplexMatrix::identity(dim_in))?
            .frobenius_norm()
            <= FLAG_TOL;
        let unital = dim_in == dim_out
            && kkt
                .sub(&ComplexMatrix::identity(dim_out))?
                .frobenius_norm()
                <= FLAG_TOL;
        let completely_positive = if pre_transpose {
            // certified positive only; CP is not claimed for this family
            false
        } else {
            // Kraus form is CP by construction; cross-check via the Choi
            // eigenvalues so numerical corruption is caught early.
            let choi = choi_of(&kraus, dim_in, dim_out, false)?;
            hermitian_eig(&choi.hermitize())?.min_eigenvalue() >= -FLAG_TOL
        };
        Ok(Self {
            kraus,
            pre_transpose,
            dim_in,
            dim_out,
            trace_preserving,
            unital,
            completely_positive,
        })
    }

    /// Identity channel on `dim`.
    pub fn identity(dim: usize) -> Self {
        Self::new(vec![ComplexMatrix::identity(dim)], false).expect("identity channel")
    }

    /// Fully depolarizing channel ρ ↦ I/d, via the full matrix-unit Kraus set.
    pub fn depolarizing(dim: usize) -> Self {
        let mut kraus = Vec::with_capacity(dim * dim);
        for i in 0..dim {
            for j in 0..dim {
                let mut k = ComplexMatrix::zeros(dim, dim);
                k.set(i, j, num_complex::Complex64::new(1.0 / (dim as f64).sqrt(), 0.0));
                kraus.push(k);
            }
        }
        Self::new(kraus, false).expect("depolarizing channel")
    }

    /// A unitary conjugation channel.
    pub fn unitary_channel(u: ComplexMatrix) -> Result<Self, QuantumError> {
        Self::new(vec![u], false)
    }

    /// Same Kraus set with the input transposition toggled on.
    pub fn with_pre_transpose(&self) -> Self {
        Self::new(self.kraus.clone(), true).expect("flag flip preserves validity")
    }

    pub fn kraus(&self) -> &[ComplexMatrix] {
        &self.kraus
    }

    pub fn pre_transpose(&self) -> bool {
        self.pre_transpose
    }

    pub fn dim_in(&self) -> usize {
        self.dim_in
    }

    pub fn dim_out(&self) -> usize {
        self.dim_out
    }

    pub fn is_tp(&self) -> bool {
        self.trace_preserving
    }

    pub fn is_unital(&self) -> bool {
        self.unital
    }

    pub fn is_cp(&self) -> bool {
        self.completely_positive
    }

    /// Apply the map to an arbitrary matrix: Σ K·T?(X)·K†.
    pub fn apply(&self, x: &ComplexMatrix) -> Result<ComplexMatrix, QuantumError> {
        if x.rows() != self.dim_in || x.cols() != self.dim_in {
            return Err(QuantumError::DimensionMismatch {
                expected: self.dim_in,
                found: x.rows(),
            });
        }
        let xin = if self.pre_transpose { x.transpose() } else { x.clone() };
        let mut out = ComplexMatrix::zeros(self.dim_out, self.dim_out);
        for k in &self.kraus {
            out = out.add(&k.matmul(&xin)?.matmul(&k.adjoint())?)?;
        }
        Ok(out)
    }

    /// Apply to a state; requires the map to be trace preserving.
    pub fn apply_to_state(&self, rho: &DensityOperator) -> Result<DensityOperator, QuantumError> {
        if !self.trace_preserving {
            return Err(QuantumError::NotTracePreserving);
        }
        let out = self.apply(rho.matrix())?.hermitize();
        DensityOperator::new(out)
    }

    /// Choi matrix Σ_{ij} |i⟩⟨j| ⊗ map(|i⟩⟨j|).
    ///
    /// PSD iff the map is completely positive; for `pre_transpose` maps this
    /// is the Choi matrix of the composite (generally non-PSD).
    pub fn choi(&self) -> Result<ComplexMatrix, QuantumError> {
        choi_of(&self.kraus, self.dim_in, self.dim_out, self.pre_transpose)
    }

    /// Tensor power: Kraus set is the n-fold product set; the input
    /// transposition factorizes over tensor products, so the flag carries.
    pub fn tensor_power(&self, n: usize) -> Result<Self, QuantumError> {
        if n == 0 {
            return Err(QuantumError::InvalidDimension(
                "tensor power requires n ≥ 1".into(),
            ));
        }
        let mut kraus: Vec<ComplexMatrix> = self.kraus.clone();
        for _ in 1..n {
            let mut next = Vec::with_capacity(kraus.len() * self.kraus.len());
            for a in &kraus {
                for b in &self.kraus {
                    next.push(a.kron(b));
                }
            }
            kraus = next;
        }
        Self::new(kraus, self.pre_transpose)
    }

    /// Extend to A⊗R with the identity on a reference system of dimension
    /// `dim_r`: Kraus set {K ⊗ I_R}. Only available without input
    /// transposition (a partial transpose would not stay positive).
    pub fn tensor_with_identity(&self, dim_r: usize) -> Result<Self, QuantumError> {
        if self.pre_transpose {
            return Err(QuantumError::UnsupportedForTransposeMaps(
                "identity extension of a transpose-composed map".into(),
            ));
        }
        let id = ComplexMatrix::identity(dim_r);
        let kraus = self.kraus.iter().map(|k| k.kron(&id)).collect();
        Self::new(kraus, false)
    }
}

fn choi_of(
    kraus: &[ComplexMatrix],
    dim_in: usize,
    dim_out: usize,
    pre_transpose: bool,
) -> Result<ComplexMatrix, QuantumError> {
    let mut choi = ComplexMatrix::zeros(dim_in * dim_out, dim_in * dim_out);
    for i in 0..dim_in {
        for j in 0..dim_in {
            let mut eij = ComplexMatrix::zeros(dim_in, dim_in);
            eij.set(i, j, num_complex::Complex64::new(1.0, 0.0));
            let xin = if pre_transpose { eij.transpose() } else { eij };
            let mut block = ComplexMatrix::zeros(dim_out, dim_out);
            for k in kraus {
                block = block.add(&k.matmul(&xin)?.matmul(&k.adjoint())?)?;
            }
            for a in 0..dim_out {
                for b in 0..dim_out {
                    choi.set(i * dim_out + a, j * dim_out + b, block.get(a, b));
                }
            }
        }
    }
    Ok(choi)
}

/// JSON wire form: `{"kraus": [matrix...], "pre_transpose": bool}`.
#[derive(Serialize, Deserialize)]
struct ChannelJson {
    kraus: Vec<ComplexMatrix>,
    pre_transpose: bool,
}

impl Serialize for PositiveMapRep {
    fn serialize<S: serde::Serializer>(&self, ser: S) -> Result<S::Ok, S::Error> {
        ChannelJson {
            kraus: self.kraus.clone(),
            pre_transpose: self.pre_transpose,
        }
        .serialize(ser)
    }
}

impl<'de> Deserialize<'de> for PositiveMapRep {
    fn deserialize<D: serde::Deserializer<'de>>(de: D) -> Result<Self, D::Error> {
        use serde::de::Error;
        let raw = ChannelJson::deserialize(de)?;
        PositiveMapRep::new(raw.kraus, raw.pre_transpose).map_err(D::Error::custom)
    }
}
