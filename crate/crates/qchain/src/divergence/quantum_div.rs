//! Sandwiched and geometric Rényi divergences and Rényi entropies.

use crate::numkernel::{psd_log, psd_power};
use crate::quantum::DensityOperator;

use super::order::RenyiOrder;
use super::value::DivValue;
use super::DivergenceError;

/// Divergence family used by channel and chain-rule machinery.
#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum DivKind {
    Sandwiched,
    Geometric,
}

impl DivKind {
    pub fn eval(
        &self,
        rho: &DensityOperator,
        sigma: &DensityOperator,
        order: RenyiOrder,
    ) -> Result<DivValue, DivergenceError> {
        match self {
            DivKind::Sandwiched => sandwiched(rho, sigma, order),
            DivKind::Geometric => geometric(rho, sigma, order),
        }
    }

    /// The order range on which this family satisfies data processing.
    pub fn order_in_dpi_range(&self, order: RenyiOrder) -> bool {
        match self {
            DivKind::Sandwiched => match order {
                RenyiOrder::Finite(a) => a >= 0.5,
                RenyiOrder::One | RenyiOrder::Infinity => true,
            },
            DivKind::Geometric => match order {
                RenyiOrder::Finite(a) => a <= 2.0,
                RenyiOrder::One => true,
                RenyiOrder::Infinity => false,
            },
        }
    }
}

impl std::fmt::Display for DivKind {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            DivKind::Sandwiched => write!(f, "sandwiched"),
            DivKind::Geometric => write!(f, "geometric"),
        }
    }
}

/// Relative floor for quasi-value spectral sums.
///
/// This is deliberately far below the support cutoff used for operator
/// powers: at α < 1 a genuinely tiny eigenvalue λ of the sandwiched
/// matrix still contributes λ^α, and products of per-factor eigenvalues
/// in tensor instances routinely fall below 1e−10·λ_max while remaining
/// real. The floor only has to sit above eigensolver noise so that
/// exact-zero eigenvalues (computed as ~1e−15·λ_max) drop out.
const QUASI_SUM_FLOOR: f64 = 1e-13;

fn quasi_sum(eig: &crate::numkernel::HermitianEigen, alpha: f64) -> f64 {
    let floor = QUASI_SUM_FLOOR * eig.max_eigenvalue().max(0.0);
    eig.eigenvalues
        .iter()
        .filter(|&&l| l > floor)
        .map(|&l| l.powf(alpha))
        .sum()
}

fn check_dims(rho: &DensityOperator, sigma: &DensityOperator) -> Result<(), DivergenceError> {
    if rho.dim() != sigma.dim() {
        return Err(DivergenceError::DimensionMismatch {
            expected: rho.dim(),
            found: sigma.dim(),
        });
    }
    Ok(())
}

/// Sandwiched Rényi divergence D̃_α(ρ‖σ) in bits.
///
/// Finite α: (1/(α−1))·log₂ Tr[(σ^{(1−α)/2α} ρ σ^{(1−α)/2α})^α], with σ
/// powers taken on the support. The α → 1 limit is Tr[ρ(log₂ρ − log₂σ)]
/// and the α → ∞ limit is the max-divergence log₂ λ_max(σ^{−1/2}ρσ^{−1/2}).
/// For α ≥ 1 the value is +∞ unless ρ ≪ σ.
pub fn sandwiched(
    rho: &DensityOperator,
    sigma: &DensityOperator,
    order: RenyiOrder,
) -> Result<DivValue, DivergenceError> {
    check_dims(rho, sigma)?;
    if order.requires_support_containment() && !sigma.dominates(rho) {
        return Ok(DivValue::infinite_support_violation());
    }
    match order {
        RenyiOrder::One => {
            let tr_rho_log_rho: f64 = rho
                .eigenvalues()
                .iter()
                .filter(|&&l| l > 0.0)
                .map(|&l| l * l.log2())
                .sum();
            let log_sigma = psd_log(sigma.matrix())?;
            let tr_rho_log_sigma = rho.matrix().inner_trace(&log_sigma);
            Ok(DivValue::finite(tr_rho_log_rho - tr_rho_log_sigma, None))
        }
        RenyiOrder::Infinity => {
            let inv_sqrt = psd_power(sigma.matrix(), -0.5)?;
            let x = inv_sqrt
                .matmul(rho.matrix())?
                .matmul(&inv_sqrt)?
                .hermitize();
            let lmax = crate::numkernel::hermitian_eig(&x)?.max_eigenvalue();
            Ok(DivValue::finite(lmax.log2(), None))
        }
        RenyiOrder::Finite(alpha) => {
            let s = (1.0 - alpha) / (2.0 * alpha);
            let a = psd_power(sigma.matrix(), s)?;
            let x = a.matmul(rho.matrix())?.matmul(&a)?.hermitize();
            let eig = crate::numkernel::hermitian_eig(&x)?;
            let quasi = quasi_sum(&eig, alpha);
            if quasi <= 0.0 {
                return Ok(DivValue::infinite_zero_overlap());
            }
            Ok(DivValue::finite(quasi.log2() / (alpha - 1.0), Some(quasi)))
        }
    }
}

/// Geometric Rényi divergence D̂_α(ρ‖σ) in bits.
///
/// Finite α: (1/(α−1))·log₂ Tr[σ^{1/2}(σ^{−1/2}ρσ^{−1/2})^α σ^{1/2}]; the
/// α → 1 limit is Tr[ρ log₂(ρ^{1/2}σ^{−1}ρ^{1/2})]. Requires ρ ≪ σ for
/// every order; evaluations outside (0,2] are formal extensions and are
/// flagged as such in the diagnostics.
pub fn geometric(
    rho: &DensityOperator,
    sigma: &DensityOperator,
    order: RenyiOrder,
) -> Result<DivValue, DivergenceError> {
    check_dims(rho, sigma)?;
    if !sigma.dominates(rho) {
        return Ok(DivValue::infinite_support_violation());
    }
    let formal = match order {
        RenyiOrder::Finite(a) => a > 2.0,
        RenyiOrder::One => false,
        RenyiOrder::Infinity => true,
    };
    let value = match order {
        RenyiOrder::One => {
            let sqrt_rho = psd_power(rho.matrix(), 0.5)?;
            let inv_sigma = psd_power(sigma.matrix(), -1.0)?;
            let y = sqrt_rho
                .matmul(&inv_sigma)?
                .matmul(&sqrt_rho)?
                .hermitize();
            let log_y = psd_log(&y)?;
            DivValue::finite(rho.matrix().inner_trace(&log_y), None)
        }
        RenyiOrder::Infinity => {
            let inv_sqrt = psd_power(sigma.matrix(), -0.5)?;
            let x = inv_sqrt
                .matmul(rho.matrix())?
                .matmul(&inv_sqrt)?
                .hermitize();
            let lmax = crate::numkernel::hermitian_eig(&x)?.max_eigenvalue();
            DivValue::finite(lmax.log2(), None)
        }
        RenyiOrder::Finite(alpha) => {
            let inv_sqrt = psd_power(sigma.matrix(), -0.5)?;
            let x = inv_sqrt
                .matmul(rho.matrix())?
                .matmul(&inv_sqrt)?
                .hermitize();
            // Tr[σ^{1/2} X^α σ^{1/2}] as a σ-weighted spectral sum, with
            // the same noise floor as the sandwiched quasi-value
            let eig = crate::numkernel::hermitian_eig(&x)?;
            let floor = QUASI_SUM_FLOOR * eig.max_eigenvalue().max(0.0);
            let mut quasi = 0.0;
            for (k, &lambda) in eig.eigenvalues.iter().enumerate() {
                if lambda > floor {
                    let col = eig.eigenvectors.column(k);
                    let sv = sigma.matrix().matvec(&col);
                    let weight: f64 = col
                        .iter()
                        .zip(sv.iter())
                        .map(|(a, b)| (a.conj() * b).re)
                        .sum();
                    quasi += lambda.powf(alpha) * weight.max(0.0);
                }
            }
            if quasi <= 0.0 {
                return Ok(DivValue::infinite_zero_overlap());
            }
            DivValue::finite(quasi.log2() / (alpha - 1.0), Some(quasi))
        }
    };
    Ok(if formal { value.with_formal_extension() } else { value })
}

/// Quantum Rényi entropy H_α(ρ) in bits; always finite, in [0, log₂ d].
pub fn renyi_entropy(rho: &DensityOperator, order: RenyiOrder) -> f64 {
    let evs = rho.eigenvalues();
    match order {
        RenyiOrder::One => evs
            .iter()
            .filter(|&&l| l > 0.0)
            .map(|&l| -l * l.log2())
            .sum(),
        RenyiOrder::Infinity => {
            let m = evs.iter().cloned().fold(0.0, f64::max);
            -m.log2()
        }
        RenyiOrder::Finite(alpha) => {
            let s: f64 = evs
                .iter()
                .filter(|&&l| l > 0.0)
                .map(|&l| l.powf(alpha))
                .sum();
            s.log2() / (1.0 - alpha)
        }
    }
}
