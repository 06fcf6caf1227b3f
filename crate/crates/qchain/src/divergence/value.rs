//! Extended-real divergence results with diagnostics.

use serde::{Deserialize, Serialize};

/// Diagnostic payload attached to a divergence value.
#[derive(Debug, Clone, Default, Serialize, Deserialize)]
pub struct DivDiagnostics {
    /// The first argument's support is not contained in the second's
    /// (for orders that require it, this forces +∞).
    pub support_violation: bool,
    /// The quasi-value Q_α behind a finite-order result.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub quasi_value: Option<f64>,
    /// Set when a geometric divergence is evaluated outside (0,2], where
    /// the formula is a formal extension without operational meaning.
    #[serde(default, skip_serializing_if = "std::ops::Not::not")]
    pub formal_extension: bool,
}

/// A divergence value in bits: finite, or +∞.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct DivValue {
    value_bits: f64,
    pub diagnostics: DivDiagnostics,
}

impl DivValue {
    pub fn finite(value_bits: f64, quasi_value: Option<f64>) -> Self {
        debug_assert!(value_bits.is_finite());
        Self {
            value_bits,
            diagnostics: DivDiagnostics {
                support_violation: false,
                quasi_value,
                formal_extension: false,
            },
        }
    }

    /// +∞ caused by a support violation.
    pub fn infinite_support_violation() -> Self {
        Self {
            value_bits: f64::INFINITY,
            diagnostics: DivDiagnostics {
                support_violation: true,
                quasi_value: None,
                formal_extension: false,
            },
        }
    }

    /// +∞ from a zero quasi-value at α < 1 (fully disjoint supports).
    pub fn infinite_zero_overlap() -> Self {
        Self {
            value_bits: f64::INFINITY,
            diagnostics: DivDiagnostics {
                support_violation: true,
                quasi_value: Some(0.0),
                formal_extension: false,
            },
        }
    }

    pub fn with_formal_extension(mut self) -> Self {
        self.diagnostics.formal_extension = true;
        self
    }

    pub fn bits(&self) -> f64 {
        self.value_bits
    }

    pub fn is_infinite(&self) -> bool {
        self.value_bits.is_infinite()
    }

    pub fn quasi_value(&self) -> Option<f64> {
        self.diagnostics.quasi_value
    }
}
