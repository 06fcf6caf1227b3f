//! Reproducible random instances: states, unitaries, channels.
//!
//! All generators take explicit 64-bit seeds and run on ChaCha12 streams,
//! so identical seeds give identical bits on every platform and thread
//! count. Substreams for campaign cells are derived by mixing tag words
//! into the base seed (splitmix64), which keeps parallel trials
//! independent of scheduling order.

use num_complex::Complex64;
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha12Rng;
use rand_distr::StandardNormal;

use crate::numkernel::ComplexMatrix;

use super::maps::PositiveMapRep;
use super::state::DensityOperator;
use super::QuantumError;

fn splitmix64(mut x: u64) -> u64 {
    x = x.wrapping_add(0x9E3779B97F4A7C15);
    let mut z = x;
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58476D1CE4E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D049BB133111EB);
    z ^ (z >> 31)
}

/// Derive a deterministic substream seed from a base seed and tag words.
pub fn substream_seed(base: u64, tags: &[u64]) -> u64 {
    let mut s = splitmix64(base);
    for &t in tags {
        s = splitmix64(s ^ splitmix64(t));
    }
    s
}

/// RNG for a derived substream.
pub fn substream_rng(base: u64, tags: &[u64]) -> ChaCha12Rng {
    ChaCha12Rng::seed_from_u64(substream_seed(base, tags))
}

fn gaussian_complex(rng: &mut ChaCha12Rng) -> Complex64 {
    let re: f64 = rng.sample(StandardNormal);
    let im: f64 = rng.sample(StandardNormal);
    Complex64::new(re, im)
}

/// Ginibre matrix with i.i.d. standard complex Gaussian entries.
pub fn ginibre(rows: usize, cols: usize, rng: &mut ChaCha12Rng) -> ComplexMatrix {
    ComplexMatrix::from_fn(rows, cols, |_, _| gaussian_complex(rng))
}

/// Hilbert-Schmidt-distributed random state of the given rank, obtained by
/// tracing out the purifying system of a Ginibre purification.
pub fn random_state(dim: usize, rank: usize, seed: u64) -> DensityOperator {
    random_state_rng(dim, rank, &mut ChaCha12Rng::seed_from_u64(seed))
}

pub fn random_state_rng(dim: usize, rank: usize, rng: &mut ChaCha12Rng) -> DensityOperator {
    assert!(rank >= 1 && rank <= dim, "state rank must be in 1..=dim");
    let g = ginibre(dim, rank, rng);
    let x = g.matmul(&g.adjoint()).expect("dims");
    let tr = x.trace().re;
    DensityOperator::new(x.scale_re(1.0 / tr).hermitize()).expect("Ginibre state is valid")
}

/// Full-rank random state with bounded condition number and a minimum
/// relative spectral gap. Redraws until both hold; generic draws satisfy
/// them almost surely, so this terminates immediately in practice.
pub fn random_state_gapped(
    dim: usize,
    rng: &mut ChaCha12Rng,
    max_condition: f64,
    min_rel_gap: f64,
) -> DensityOperator {
    for _ in 0..10_000 {
        let state = random_state_rng(dim, dim, rng);
        let evs = state.eigenvalues();
        let lmax = evs[dim - 1];
        let lmin = evs[0];
        if lmin <= 0.0 || lmax / lmin > max_condition {
            continue;
        }
        let mut gap_ok = true;
        for i in 1..dim {
            if evs[i] - evs[i - 1] < min_rel_gap * lmax {
                gap_ok = false;
                break;
            }
        }
        if gap_ok {
            return state;
        }
    }
    unreachable!("gapped state generation failed to converge");
}

/// Haar-random unitary via QR of a Ginibre matrix with the phase fix that
/// makes the R diagonal positive.
pub fn random_unitary(dim: usize, seed: u64) -> ComplexMatrix {
    random_unitary_rng(dim, &mut ChaCha12Rng::seed_from_u64(seed))
}

pub fn random_unitary_rng(dim: usize, rng: &mut ChaCha12Rng) -> ComplexMatrix {
    let g = ginibre(dim, dim, rng);
    let (q, r_diag) = gram_schmidt_qr(&g);
    // multiply column j by conj(phase of R_jj)
    ComplexMatrix::from_fn(dim, dim, |i, j| {
        let phase = r_diag[j] / r_diag[j].norm();
        q.get(i, j) * phase.conj()
    })
}

/// Modified Gram-Schmidt; returns Q and the diagonal of R.
#[allow(clippy::needless_range_loop)] // two columns of `cols` are indexed at once
fn gram_schmidt_qr(g: &ComplexMatrix) -> (ComplexMatrix, Vec<Complex64>) {
    let (n, m) = (g.rows(), g.cols());
    let mut cols: Vec<Vec<Complex64>> = (0..m).map(|j| g.column(j)).collect();
    let mut r_diag = Vec::with_capacity(m);
    for j in 0..m {
        for k in 0..j {
            let proj: Complex64 = cols[k]
                .iter()
                .zip(cols[j].iter())
                .map(|(a, b)| a.conj() * b)
                .sum();
            for i in 0..n {
                let sub = proj * cols[k][i];
                cols[j][i] -= sub;
            }
        }
        let norm = cols[j].iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        r_diag.push(Complex64::new(norm, 0.0));
        for z in cols[j].iter_mut() {
            *z /= norm;
        }
    }
    let q = ComplexMatrix::from_fn(n, m, |i, j| cols[j][i]);
    (q, r_diag)
}

/// Haar-random Stinespring channel: the Kraus operators are the blocks of
/// the first `d_in` columns of a Haar unitary on out⊗env, so the result is
/// CPTP by construction.
pub fn random_channel(d_in: usize, d_out: usize, d_env: usize, seed: u64) -> Result<PositiveMapRep, QuantumError> {
    random_channel_rng(d_in, d_out, d_env, &mut ChaCha12Rng::seed_from_u64(seed))
}

pub fn random_channel_rng(
    d_in: usize,
    d_out: usize,
    d_env: usize,
    rng: &mut ChaCha12Rng,
) -> Result<PositiveMapRep, QuantumError> {
    if d_env < 1 || d_out * d_env < d_in {
        return Err(QuantumError::InvalidDimension(format!(
            "Stinespring dilation needs d_out·d_env ≥ d_in (got {d_out}·{d_env} < {d_in})"
        )));
    }
    let u = random_unitary_rng(d_out * d_env, rng);
    // isometry V = first d_in columns; Kraus K_e[i][j] = V[(i,e), j]
    let mut kraus = Vec::with_capacity(d_env);
    for e in 0..d_env {
        let k = ComplexMatrix::from_fn(d_out, d_in, |i, j| u.get(i * d_env + e, j));
        kraus.push(k);
    }
    PositiveMapRep::new(kraus, false)
}

/// Random mixed-unitary channel Σ w_i U_i·U_i† with `terms` Haar unitaries
/// and normalized uniform weights. Unital and trace preserving.
pub fn random_mixed_unitary_channel(
    dim: usize,
    terms: usize,
    rng: &mut ChaCha12Rng,
) -> PositiveMapRep {
    assert!(terms >= 1);
    let mut weights: Vec<f64> = (0..terms).map(|_| rng.gen::<f64>() + 1e-3).collect();
    let total: f64 = weights.iter().sum();
    for w in weights.iter_mut() {
        *w /= total;
    }
    let kraus = weights
        .iter()
        .map(|&w| random_unitary_rng(dim, rng).scale_re(w.sqrt()))
        .collect();
    PositiveMapRep::new(kraus, false).expect("mixed-unitary channel is valid")
}
