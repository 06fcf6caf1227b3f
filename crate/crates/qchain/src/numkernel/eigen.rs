//! Hermitian eigendecomposition and spectral matrix functions.
//!
//! The solver is a cyclic complex Jacobi iteration: each rotation first
//! removes the phase of the targeted off-diagonal entry, then applies the
//! real 2×2 rotation that annihilates it. Deterministic sweep order and
//! a fixed phase convention make the output bit-identical across calls
//! with the same input. Dimensions in this crate stay ≤ 64, where Jacobi
//! converges in a handful of sweeps and is accurate to near machine
//! precision.

use num_complex::Complex64;

use super::matrix::ComplexMatrix;
use super::NumError;

/// Relative support cutoff: eigenvalues ≤ EPS_SUPPORT·λ_max are treated as
/// exactly zero by powers, logarithms, and generalized inverses.
pub const EPS_SUPPORT: f64 = 1e-10;

/// Entrywise Hermiticity tolerance for spectral calls.
pub const HERMITICITY_TOL: f64 = 1e-10;

const JACOBI_MAX_SWEEPS: usize = 64;
const JACOBI_OFF_TOL: f64 = 1e-14;

/// Spectral decomposition of a Hermitian matrix.
///
/// Eigenvalues ascending; eigenvector `j` is the `j`-th column of
/// `eigenvectors`. Columns are phase-fixed so the largest-modulus entry
/// of each column is real and nonnegative.
#[derive(Debug, Clone)]
pub struct HermitianEigen {
    pub eigenvalues: Vec<f64>,
    pub eigenvectors: ComplexMatrix,
}

impl HermitianEigen {
    pub fn dim(&self) -> usize {
        self.eigenvalues.len()
    }

    /// V·diag(f(λ))·V† for a real spectral function `f`.
    pub fn apply_spectral_fn<F: Fn(f64) -> f64>(&self, f: F) -> ComplexMatrix {
        let d = self.dim();
        let v = &self.eigenvectors;
        let mut out = ComplexMatrix::zeros(d, d);
        for k in 0..d {
            let fv = f(self.eigenvalues[k]);
            if fv == 0.0 {
                continue;
            }
            for i in 0..d {
                let vik = v.get(i, k);
                for j in 0..d {
                    let cur = out.get(i, j);
                    out.set(i, j, cur + vik * v.get(j, k).conj() * fv);
                }
            }
        }
        out
    }

    pub fn max_eigenvalue(&self) -> f64 {
        *self.eigenvalues.last().expect("nonempty spectrum")
    }

    pub fn min_eigenvalue(&self) -> f64 {
        *self.eigenvalues.first().expect("nonempty spectrum")
    }

    /// Support cutoff for this spectrum: EPS_SUPPORT relative to λ_max.
    pub fn support_cutoff(&self) -> f64 {
        EPS_SUPPORT * self.max_eigenvalue().max(0.0)
    }

    /// Projector onto the span of eigenvectors with λ above the support cutoff.
    pub fn support_projector(&self) -> ComplexMatrix {
        let cut = self.support_cutoff();
        self.apply_spectral_fn(|l| if l > cut { 1.0 } else { 0.0 })
    }
}

/// Eigendecomposition of a Hermitian matrix.
///
/// The input is symmetrized as (M+M†)/2 before solving; asymmetry beyond
/// `HERMITICITY_TOL` (entrywise) is rejected.
pub fn hermitian_eig(m: &ComplexMatrix) -> Result<HermitianEigen, NumError> {
    if !m.is_square() {
        return Err(NumError::NotSquare {
            rows: m.rows(),
            cols: m.cols(),
        });
    }
    let defect = m.hermiticity_defect();
    if defect > HERMITICITY_TOL {
        return Err(NumError::NonHermitianInput { asymmetry: defect });
    }
    let d = m.rows();
    let mut a = m.hermitize();
    let mut v = ComplexMatrix::identity(d);
    if d > 1 {
        let scale = a.frobenius_norm().max(1e-300);
        for _ in 0..JACOBI_MAX_SWEEPS {
            let mut off = 0.0f64;
            for p in 0..d {
                for q in (p + 1)..d {
                    off += a.get(p, q).norm_sqr();
                }
            }
            if (2.0 * off).sqrt() <= JACOBI_OFF_TOL * scale {
                break;
            }
            for p in 0..d {
                for q in (p + 1)..d {
                    jacobi_rotate(&mut a, &mut v, p, q, scale);
                }
            }
        }
    }
    // Sort ascending; stable on ties so the result is reproducible.
    let mut order: Vec<usize> = (0..d).collect();
    order.sort_by(|&i, &j| {
        a.get(i, i)
            .re
            .partial_cmp(&a.get(j, j).re)
            .expect("finite eigenvalues")
            .then(i.cmp(&j))
    });
    let eigenvalues: Vec<f64> = order.iter().map(|&i| a.get(i, i).re).collect();
    let mut vectors = ComplexMatrix::zeros(d, d);
    for (new_col, &old_col) in order.iter().enumerate() {
        let mut col = v.column(old_col);
        fix_phase(&mut col);
        for (i, &entry) in col.iter().enumerate() {
            vectors.set(i, new_col, entry);
        }
    }
    Ok(HermitianEigen {
        eigenvalues,
        eigenvectors: vectors,
    })
}

/// One complex Jacobi rotation annihilating A[p][q].
fn jacobi_rotate(a: &mut ComplexMatrix, v: &mut ComplexMatrix, p: usize, q: usize, scale: f64) {
    let apq = a.get(p, q);
    let abs = apq.norm();
    if abs <= JACOBI_OFF_TOL * scale * 1e-2 {
        return;
    }
    let phase = apq / abs; // e^{iφ}
    let app = a.get(p, p).re;
    let aqq = a.get(q, q).re;
    let tau = (aqq - app) / (2.0 * abs);
    let t = if tau >= 0.0 {
        1.0 / (tau + (1.0 + tau * tau).sqrt())
    } else {
        -1.0 / (-tau + (1.0 + tau * tau).sqrt())
    };
    let c = 1.0 / (1.0 + t * t).sqrt();
    let s = t * c;
    // U is the identity except U[p][p]=c, U[p][q]=s, U[q][p]=-s·e^{-iφ},
    // U[q][q]=c·e^{-iφ}; then A ← U† A U and V ← V U.
    let upp = Complex64::new(c, 0.0);
    let upq = Complex64::new(s, 0.0);
    let uqp = -phase.conj() * s;
    let uqq = phase.conj() * c;
    let d = a.rows();
    // Columns: A ← A·U
    for i in 0..d {
        let aip = a.get(i, p);
        let aiq = a.get(i, q);
        a.set(i, p, aip * upp + aiq * uqp);
        a.set(i, q, aip * upq + aiq * uqq);
    }
    // Rows: A ← U†·A
    for j in 0..d {
        let apj = a.get(p, j);
        let aqj = a.get(q, j);
        a.set(p, j, upp.conj() * apj + uqp.conj() * aqj);
        a.set(q, j, upq.conj() * apj + uqq.conj() * aqj);
    }
    // Clean the rotated 2×2 block.
    a.set(p, q, Complex64::new(0.0, 0.0));
    a.set(q, p, Complex64::new(0.0, 0.0));
    a.set(p, p, Complex64::new(a.get(p, p).re, 0.0));
    a.set(q, q, Complex64::new(a.get(q, q).re, 0.0));
    // Accumulate V ← V·U
    for i in 0..d {
        let vip = v.get(i, p);
        let viq = v.get(i, q);
        v.set(i, p, vip * upp + viq * uqp);
        v.set(i, q, vip * upq + viq * uqq);
    }
}

/// Rotate a column's global phase so its largest-modulus entry is real ≥ 0.
fn fix_phase(col: &mut [Complex64]) {
    let mut best = 0usize;
    let mut best_norm = 0.0f64;
    for (i, z) in col.iter().enumerate() {
        let n = z.norm();
        if n > best_norm + 1e-15 {
            best_norm = n;
            best = i;
        }
    }
    if best_norm == 0.0 {
        return;
    }
    let phase = col[best] / best_norm;
    for z in col.iter_mut() {
        *z *= phase.conj();
    }
}

/// M^t on the support of M for a PSD matrix M.
///
/// Eigenvalues at or below the relative support cutoff are treated as
/// exactly zero and excluded, so negative powers are generalized inverses.
pub fn psd_power(m: &ComplexMatrix, t: f64) -> Result<ComplexMatrix, NumError> {
    let eig = hermitian_eig(m)?;
    let cut = eig.support_cutoff();
    Ok(eig.apply_spectral_fn(|l| if l > cut { l.powf(t) } else { 0.0 }))
}

/// log₂(M) on the support of M for a PSD matrix M; zero off the support.
pub fn psd_log(m: &ComplexMatrix) -> Result<ComplexMatrix, NumError> {
    let eig = hermitian_eig(m)?;
    let cut = eig.support_cutoff();
    Ok(eig.apply_spectral_fn(|l| if l > cut { l.log2() } else { 0.0 }))
}

/// Löwner comparison A ⪰ B: true iff λ_min(A−B) ≥ −tol. Also reports λ_min.
pub fn loewner_geq(
    a: &ComplexMatrix,
    b: &ComplexMatrix,
    tol: f64,
) -> Result<(bool, f64), NumError> {
    if a.rows() != b.rows() || a.cols() != b.cols() {
        return Err(NumError::DimensionMismatch {
            expected: a.rows(),
            found: b.rows(),
        });
    }
    let diff = a.sub(b)?.hermitize();
    let eig = hermitian_eig(&diff)?;
    let lmin = eig.min_eigenvalue();
    Ok((lmin >= -tol, lmin))
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha12Rng;

    fn random_hermitian(d: usize, seed: u64) -> ComplexMatrix {
        let mut rng = ChaCha12Rng::seed_from_u64(seed);
        let g = ComplexMatrix::from_fn(d, d, |_, _| {
            Complex64::new(rng.gen::<f64>() - 0.5, rng.gen::<f64>() - 0.5)
        });
        g.add(&g.adjoint()).unwrap().scale_re(0.5)
    }

    fn random_psd(d: usize, seed: u64) -> ComplexMatrix {
        let mut rng = ChaCha12Rng::seed_from_u64(seed);
        let g = ComplexMatrix::from_fn(d, d, |_, _| {
            Complex64::new(rng.gen::<f64>() - 0.5, rng.gen::<f64>() - 0.5)
        });
        g.matmul(&g.adjoint()).unwrap()
    }

    fn reconstruction_residual(m: &ComplexMatrix, eig: &HermitianEigen) -> f64 {
        let rebuilt = eig.apply_spectral_fn(|l| l);
        rebuilt.sub(m).unwrap().frobenius_norm()
    }

    #[test]
    fn diagonal_input_sorted() {
        let m = ComplexMatrix::diag(&[2.0, 1.0]);
        let eig = hermitian_eig(&m).unwrap();
        assert_eq!(eig.eigenvalues, vec![1.0, 2.0]);
        // columns are permuted identity columns
        assert!((eig.eigenvectors.get(1, 0).re - 1.0).abs() < 1e-15);
        assert!((eig.eigenvectors.get(0, 1).re - 1.0).abs() < 1e-15);
    }

    #[test]
    fn identity_spectrum() {
        let eig = hermitian_eig(&ComplexMatrix::identity(5)).unwrap();
        for l in eig.eigenvalues {
            assert!((l - 1.0).abs() < 1e-15);
        }
    }

    #[test]
    fn random_reconstruction_and_unitarity() {
        for seed in 0..20u64 {
            for d in [2usize, 3, 4, 8] {
                let m = random_hermitian(d, seed * 31 + d as u64);
                let eig = hermitian_eig(&m).unwrap();
                let res = reconstruction_residual(&m.hermitize(), &eig);
                assert!(
                    res <= 1e-11 * m.frobenius_norm().max(1.0),
                    "residual {res} for d={d} seed={seed}"
                );
                let vtv = eig.eigenvectors.adjoint().matmul(&eig.eigenvectors).unwrap();
                let defect = vtv.sub(&ComplexMatrix::identity(d)).unwrap().max_abs_entry();
                assert!(defect <= 1e-11, "unitarity defect {defect}");
            }
        }
    }

    #[test]
    fn rejects_non_hermitian() {
        let m = ComplexMatrix::from_fn(2, 2, |i, j| Complex64::new((i + 2 * j) as f64, 0.0));
        match hermitian_eig(&m) {
            Err(NumError::NonHermitianInput { .. }) => {}
            other => panic!("expected NonHermitianInput, got {other:?}"),
        }
    }

    #[test]
    fn deterministic_bitwise() {
        let m = random_hermitian(6, 99);
        let a = hermitian_eig(&m).unwrap();
        let b = hermitian_eig(&m).unwrap();
        assert_eq!(a.eigenvalues, b.eigenvalues);
        assert_eq!(a.eigenvectors, b.eigenvectors);
    }

    #[test]
    fn psd_power_basics() {
        let m = ComplexMatrix::diag(&[4.0, 1.0]);
        let r = psd_power(&m, 0.5).unwrap();
        assert!(r.sub(&ComplexMatrix::diag(&[2.0, 1.0])).unwrap().frobenius_norm() < 1e-12);
        // generalized inverse square root on the support
        let m = ComplexMatrix::diag(&[4.0, 0.0]);
        let r = psd_power(&m, -0.5).unwrap();
        assert!(r.sub(&ComplexMatrix::diag(&[0.5, 0.0])).unwrap().frobenius_norm() < 1e-12);
    }

    #[test]
    fn psd_power_square_matches_matmul() {
        let m = random_psd(4, 5);
        let direct = m.matmul(&m).unwrap();
        let viaeig = psd_power(&m, 2.0).unwrap();
        assert!(direct.sub(&viaeig).unwrap().frobenius_norm() < 1e-10 * direct.frobenius_norm().max(1.0));
    }

    #[test]
    fn psd_power_composes() {
        // strictly positive input: (M^s)^t = M^{s·t}
        let m = random_psd(3, 17)
            .add(&ComplexMatrix::identity(3).scale_re(0.5))
            .unwrap();
        let a = psd_power(&psd_power(&m, 0.5).unwrap(), 3.0).unwrap();
        let b = psd_power(&m, 1.5).unwrap();
        assert!(a.sub(&b).unwrap().frobenius_norm() < 1e-9);
    }

    #[test]
    fn psd_log_support_convention() {
        let m = ComplexMatrix::diag(&[8.0, 4.0, 0.0]);
        let l = psd_log(&m).unwrap();
        assert!(l.sub(&ComplexMatrix::diag(&[3.0, 2.0, 0.0])).unwrap().frobenius_norm() < 1e-12);
        let z = psd_log(&ComplexMatrix::identity(3)).unwrap();
        assert!(z.frobenius_norm() < 1e-12);
    }

    #[test]
    fn loewner_reports_min_eigenvalue() {
        let i = ComplexMatrix::identity(2);
        let half = i.scale_re(0.5);
        let (ok, _) = loewner_geq(&i, &half, 1e-9).unwrap();
        assert!(ok);
        let (ok, lmin) = loewner_geq(&half, &i, 1e-9).unwrap();
        assert!(!ok);
        assert!((lmin + 0.5).abs() < 1e-12);
    }

    #[test]
    fn loewner_transitive_at_combined_tol() {
        for seed in 0..10u64 {
            let a = random_psd(3, seed);
            let gap1 = random_psd(3, seed + 100);
            let gap2 = random_psd(3, seed + 200);
            let b = a.add(&gap1).unwrap();
            let c = b.add(&gap2).unwrap();
            let (ab, _) = loewner_geq(&c, &b, 1e-9).unwrap();
            let (bc, _) = loewner_geq(&b, &a, 1e-9).unwrap();
            let (ac, _) = loewner_geq(&c, &a, 2e-9).unwrap();
            assert!(ab && bc && ac);
        }
    }
}
