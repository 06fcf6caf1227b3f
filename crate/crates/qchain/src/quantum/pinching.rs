//! Spectral pinching, spectrum clustering, joint eigenbases, and
//! rank-one projective measurements.

use num_complex::Complex64;

use crate::divergence::Distribution;
use crate::numkernel::{hermitian_eig, ComplexMatrix};

use super::state::DensityOperator;
use super::QuantumError;

/// Default relative gap below which eigenvalues merge into one cluster.
pub const DEFAULT_CLUSTER_TOL: f64 = 1e-8;

/// Clustered spectrum of a state: distinct eigenvalues with their
/// eigenprojectors. `count` is the number of distinct eigenvalues, the
/// quantity that controls the pinching inequality.
#[derive(Debug, Clone)]
pub struct SpectrumInfo {
    pub distinct_values: Vec<f64>,
    pub projectors: Vec<ComplexMatrix>,
    pub count: usize,
}

/// Cluster the spectrum of `sigma`: ascending eigenvalues whose adjacent
/// gap is ≤ `cluster_tol`·λ_max fall into the same cluster. Projectors sum
/// to the identity and are mutually orthogonal.
pub fn spectrum(sigma: &DensityOperator, cluster_tol: f64) -> SpectrumInfo {
    let eig = sigma.eigen();
    let d = sigma.dim();
    let lmax = eig.max_eigenvalue().max(0.0);
    let gap = cluster_tol * lmax;
    let mut clusters: Vec<Vec<usize>> = vec![vec![0]];
    for i in 1..d {
        if eig.eigenvalues[i] - eig.eigenvalues[i - 1] <= gap {
            clusters.last_mut().unwrap().push(i);
        } else {
            clusters.push(vec![i]);
        }
    }
    let mut distinct_values = Vec::with_capacity(clusters.len());
    let mut projectors = Vec::with_capacity(clusters.len());
    for cluster in &clusters {
        let mean =
            cluster.iter().map(|&i| eig.eigenvalues[i]).sum::<f64>() / cluster.len() as f64;
        distinct_values.push(mean.max(0.0));
        let mut proj = ComplexMatrix::zeros(d, d);
        for &i in cluster {
            let col = eig.eigenvectors.column(i);
            proj = proj.add(&ComplexMatrix::outer(&col)).expect("same dim");
        }
        projectors.push(proj.hermitize());
    }
    let count = distinct_values.len();
    SpectrumInfo {
        distinct_values,
        projectors,
        count,
    }
}

/// Spectral pinching of `rho` with respect to `sigma`: Σ_λ P_λ ρ P_λ over
/// the eigenprojectors of `sigma`. The output commutes with `sigma` and
/// agrees with `rho` on every σ-eigenblock, so traces against `sigma` are
/// preserved.
pub fn pinch(sigma: &DensityOperator, rho: &DensityOperator) -> Result<DensityOperator, QuantumError> {
    pinch_with_tol(sigma, rho, DEFAULT_CLUSTER_TOL)
}

pub fn pinch_with_tol(
    sigma: &DensityOperator,
    rho: &DensityOperator,
    cluster_tol: f64,
) -> Result<DensityOperator, QuantumError> {
    if sigma.dim() != rho.dim() {
        return Err(QuantumError::DimensionMismatch {
            expected: sigma.dim(),
            found: rho.dim(),
        });
    }
    let spec = spectrum(sigma, cluster_tol);
    let d = rho.dim();
    let mut out = ComplexMatrix::zeros(d, d);
    for proj in &spec.projectors {
        let term = proj.matmul(rho.matrix()).expect("dim").matmul(proj).expect("dim");
        out = out.add(&term).expect("dim");
    }
    DensityOperator::new(out.hermitize())
}

/// Orthonormal basis diagonalizing two commuting Hermitian states at once.
///
/// Diagonalizes `sigma` first, then re-diagonalizes `tau` inside each
/// σ-eigenspace. Fails with `NonCommutingInputs` when ‖[σ,τ]‖_F exceeds
/// the tolerance.
pub fn joint_eigenbasis(
    sigma: &DensityOperator,
    tau: &DensityOperator,
) -> Result<ComplexMatrix, QuantumError> {
    const COMMUTATOR_TOL: f64 = 1e-8;
    if sigma.dim() != tau.dim() {
        return Err(QuantumError::DimensionMismatch {
            expected: sigma.dim(),
            found: tau.dim(),
        });
    }
    let st = sigma.matrix().matmul(tau.matrix()).expect("dim");
    let ts = tau.matrix().matmul(sigma.matrix()).expect("dim");
    let comm = st.sub(&ts).expect("dim").frobenius_norm();
    if comm > COMMUTATOR_TOL {
        return Err(QuantumError::NonCommutingInputs { commutator: comm });
    }
    let d = sigma.dim();
    let spec = spectrum(sigma, DEFAULT_CLUSTER_TOL);
    let sigma_eig = sigma.eigen();
    // Group σ-eigenvector columns by cluster, preserving ascending order.
    let lmax = sigma_eig.max_eigenvalue().max(0.0);
    let gap = DEFAULT_CLUSTER_TOL * lmax;
    let mut cluster_cols: Vec<Vec<usize>> = vec![vec![0]];
    for i in 1..d {
        if sigma_eig.eigenvalues[i] - sigma_eig.eigenvalues[i - 1] <= gap {
            cluster_cols.last_mut().unwrap().push(i);
        } else {
            cluster_cols.push(vec![i]);
        }
    }
    debug_assert_eq!(cluster_cols.len(), spec.count);
    let mut basis = ComplexMatrix::zeros(d, d);
    let mut next_col = 0usize;
    for cols in &cluster_cols {
        let k = cols.len();
        if k == 1 {
            let col = sigma_eig.eigenvectors.column(cols[0]);
            for (i, &v) in col.iter().enumerate() {
                basis.set(i, next_col, v);
            }
            next_col += 1;
            continue;
        }
        // B: d×k isometry spanning the eigenspace; diagonalize B† τ B.
        let mut b = ComplexMatrix::zeros(d, k);
        for (jj, &cidx) in cols.iter().enumerate() {
            let col = sigma_eig.eigenvectors.column(cidx);
            for (i, &v) in col.iter().enumerate() {
                b.set(i, jj, v);
            }
        }
        let small = b
            .adjoint()
            .matmul(tau.matrix())
            .expect("dim")
            .matmul(&b)
            .expect("dim")
            .hermitize();
        let inner = hermitian_eig(&small)?;
        let rotated = b.matmul(&inner.eigenvectors).expect("dim");
        for jj in 0..k {
            for i in 0..d {
                basis.set(i, next_col + jj, rotated.get(i, jj));
            }
        }
        next_col += k;
    }
    Ok(basis)
}

/// Measurement statistics of `rho` in an orthonormal basis (columns of
/// `basis`): probabilities ⟨x|ρ|x⟩.
pub fn measure(basis: &ComplexMatrix, rho: &DensityOperator) -> Result<Distribution, QuantumError> {
    if basis.rows() != rho.dim() || basis.cols() != rho.dim() {
        return Err(QuantumError::DimensionMismatch {
            expected: rho.dim(),
            found: basis.rows(),
        });
    }
    let d = rho.dim();
    let mut probs = Vec::with_capacity(d);
    for x in 0..d {
        let col = basis.column(x);
        let rv = rho.matrix().matvec(&col);
        let p: Complex64 = col
            .iter()
            .zip(rv.iter())
            .map(|(c, r)| c.conj() * r)
            .sum();
        probs.push(p.re);
    }
    Ok(Distribution::new(probs)?)
}

/// The rank-one projective measurement map for a basis, X ↦ Σ_x ⟨x|X|x⟩ |x⟩⟨x|.
pub fn measurement_map_apply(basis: &ComplexMatrix, x: &ComplexMatrix) -> ComplexMatrix {
    let d = basis.rows();
    let mut out = ComplexMatrix::zeros(d, d);
    for k in 0..d {
        let col = basis.column(k);
        let xv = x.matvec(&col);
        let val: Complex64 = col.iter().zip(xv.iter()).map(|(c, r)| c.conj() * r).sum();
        let proj = ComplexMatrix::outer(&col);
        out = out.add(&proj.scale(val)).expect("dim");
    }
    out
}
