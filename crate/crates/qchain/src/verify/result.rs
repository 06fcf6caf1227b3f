//! Check results and extended-real slack arithmetic.

use serde::Serialize;

/// Outcome of one inequality check on one instance.
///
/// `slack = rhs − lhs` in extended-real arithmetic; `pass ⇔ slack ≥ −tol`.
/// Equality-style checks encode the absolute gap as `lhs` against an
/// `rhs` of zero, so the same pass rule applies everywhere. `gated` is
/// false for exploration runs outside a check's asserted order range;
/// those never fail a campaign.
#[derive(Debug, Clone, Serialize)]
pub struct CheckResult {
    pub name: String,
    pub dim: usize,
    pub order_label: String,
    pub trial: usize,
    pub lhs_bits: f64,
    pub rhs_bits: f64,
    pub slack: f64,
    pub pass: bool,
    pub gated: bool,
    pub tol: f64,
    pub instance_digest: String,
    pub details: Vec<(String, f64)>,
}

impl CheckResult {
    pub fn new(
        name: impl Into<String>,
        lhs_bits: f64,
        rhs_bits: f64,
        tol: f64,
    ) -> Self {
        let slack = ext_slack(rhs_bits, lhs_bits);
        Self {
            name: name.into(),
            dim: 0,
            order_label: String::new(),
            trial: 0,
            lhs_bits,
            rhs_bits,
            slack,
            pass: slack >= -tol,
            gated: true,
            tol,
            instance_digest: String::new(),
            details: Vec::new(),
        }
    }

    /// Gap-style result: passes iff |gap| ≤ tol.
    pub fn equality(name: impl Into<String>, gap: f64, tol: f64) -> Self {
        Self::new(name, gap.abs(), 0.0, tol)
    }

    pub fn with_detail(mut self, key: impl Into<String>, value: f64) -> Self {
        self.details.push((key.into(), value));
        self
    }

    pub fn exploration(mut self) -> Self {
        self.gated = false;
        self
    }

    pub fn with_instance(mut self, dim: usize, order_label: &str, trial: usize, digest: String) -> Self {
        self.dim = dim;
        self.order_label = order_label.to_string();
        self.trial = trial;
        self.instance_digest = digest;
        self
    }
}

/// rhs − lhs over the extended reals, never NaN: a +∞ right-hand side
/// passes trivially, a +∞ left-hand side against a finite right-hand
/// side fails outright.
pub fn ext_slack(rhs: f64, lhs: f64) -> f64 {
    if rhs == f64::INFINITY {
        return f64::INFINITY;
    }
    if lhs == f64::NEG_INFINITY {
        return f64::INFINITY;
    }
    if lhs == f64::INFINITY {
        return f64::NEG_INFINITY;
    }
    rhs - lhs
}

/// Sum over the extended reals with +∞ absorbing.
pub fn ext_add(a: f64, b: f64) -> f64 {
    if a == f64::INFINITY || b == f64::INFINITY {
        f64::INFINITY
    } else {
        a + b
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn slack_handles_infinities() {
        assert_eq!(ext_slack(f64::INFINITY, 1.0), f64::INFINITY);
        assert_eq!(ext_slack(f64::INFINITY, f64::INFINITY), f64::INFINITY);
        assert_eq!(ext_slack(1.0, f64::INFINITY), f64::NEG_INFINITY);
        assert_eq!(ext_slack(2.0, 0.5), 1.5);
        assert!(!ext_slack(1.0, f64::INFINITY).is_nan());
    }

    #[test]
    fn equality_encoding() {
        let r = CheckResult::equality("x", 1e-9, 1e-7);
        assert!(r.pass);
        let r = CheckResult::equality("x", -1e-5, 1e-7);
        assert!(!r.pass);
    }
}
