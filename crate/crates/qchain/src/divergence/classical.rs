//! Classical Rényi divergences over finite alphabets.

use serde::{Deserialize, Serialize};

use super::order::RenyiOrder;
use super::value::DivValue;
use super::DivergenceError;

const NEG_CLIP: f64 = 1e-12;
const SUM_TOL: f64 = 1e-9;

/// A probability distribution over a finite alphabet. Entries within
/// −1e−12 of zero are clipped to exactly zero at construction; the sum
/// must be 1 within 1e−9.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Distribution {
    probs: Vec<f64>,
}

impl Distribution {
    pub fn new(mut probs: Vec<f64>) -> Result<Self, DivergenceError> {
        for p in probs.iter_mut() {
            if !p.is_finite() {
                return Err(DivergenceError::BadDistribution(
                    "non-finite probability".into(),
                ));
            }
            if *p < 0.0 {
                if *p < -NEG_CLIP {
                    return Err(DivergenceError::BadDistribution(format!(
                        "negative probability {p}"
                    )));
                }
                *p = 0.0;
            }
        }
        let sum: f64 = probs.iter().sum();
        if (sum - 1.0).abs() > SUM_TOL {
            return Err(DivergenceError::BadDistribution(format!(
                "probabilities sum to {sum}"
            )));
        }
        Ok(Self { probs })
    }

    /// Point mass at `x`.
    pub fn point_mass(len: usize, x: usize) -> Self {
        let mut probs = vec![0.0; len];
        probs[x] = 1.0;
        Self { probs }
    }

    pub fn probs(&self) -> &[f64] {
        &self.probs
    }

    pub fn len(&self) -> usize {
        self.probs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.probs.is_empty()
    }
}

/// Classical Rényi divergence D_α(P‖Q) in bits.
///
/// Conventions: 0·log 0 = 0 and 0^0 = 1; for α > 1 (including the α → 1
/// and α → ∞ limits) the value is +∞ unless supp(P) ⊆ supp(Q); for
/// α ∈ (0,1) the sum runs over the common support and the value is +∞
/// only when the supports are fully disjoint (quasi-value zero).
pub fn classical_renyi(
    p: &Distribution,
    q: &Distribution,
    order: RenyiOrder,
) -> Result<DivValue, DivergenceError> {
    if p.len() != q.len() {
        return Err(DivergenceError::AlphabetMismatch {
            left: p.len(),
            right: q.len(),
        });
    }
    let pv = p.probs();
    let qv = q.probs();
    let supp_violated = pv.iter().zip(qv).any(|(&pi, &qi)| pi > 0.0 && qi == 0.0);
    match order {
        RenyiOrder::One => {
            if supp_violated {
                return Ok(DivValue::infinite_support_violation());
            }
            let mut acc = 0.0;
            for (&pi, &qi) in pv.iter().zip(qv) {
                if pi > 0.0 {
                    acc += pi * (pi / qi).log2();
                }
            }
            Ok(DivValue::finite(acc, None))
        }
        RenyiOrder::Infinity => {
            if supp_violated {
                return Ok(DivValue::infinite_support_violation());
            }
            let mut best = f64::NEG_INFINITY;
            for (&pi, &qi) in pv.iter().zip(qv) {
                if pi > 0.0 {
                    best = best.max((pi / qi).log2());
                }
            }
            Ok(DivValue::finite(best, None))
        }
        RenyiOrder::Finite(alpha) => {
            if alpha > 1.0 {
                if supp_violated {
                    return Ok(DivValue::infinite_support_violation());
                }
                let mut quasi = 0.0;
                for (&pi, &qi) in pv.iter().zip(qv) {
                    if pi > 0.0 {
                        quasi += pi.powf(alpha) * qi.powf(1.0 - alpha);
                    }
                }
                Ok(DivValue::finite(quasi.log2() / (alpha - 1.0), Some(quasi)))
            } else {
                // α < 1: finite over the common support
                let mut quasi = 0.0;
                for (&pi, &qi) in pv.iter().zip(qv) {
                    if pi > 0.0 && qi > 0.0 {
                        quasi += pi.powf(alpha) * qi.powf(1.0 - alpha);
                    }
                }
                if quasi == 0.0 {
                    return Ok(DivValue::infinite_zero_overlap());
                }
                Ok(DivValue::finite(quasi.log2() / (alpha - 1.0), Some(quasi)))
            }
        }
    }
}

/// Classical Rényi entropy H_α(P) in bits.
pub fn classical_renyi_entropy(p: &Distribution, order: RenyiOrder) -> f64 {
    match order {
        RenyiOrder::One => p
            .probs()
            .iter()
            .filter(|&&x| x > 0.0)
            .map(|&x| -x * x.log2())
            .sum(),
        RenyiOrder::Infinity => {
            let m = p.probs().iter().cloned().fold(0.0, f64::max);
            -m.log2()
        }
        RenyiOrder::Finite(alpha) => {
            let s: f64 = p
                .probs()
                .iter()
                .filter(|&&x| x > 0.0)
                .map(|&x| x.powf(alpha))
                .sum();
            s.log2() / (1.0 - alpha)
        }
    }
}
