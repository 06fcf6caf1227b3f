//! Tagged Rényi orders.

use std::fmt;

use serde::{Deserialize, Serialize};

use super::DivergenceError;

/// Guard band around α = 1: finite orders this close are rejected because
/// the 1/(α−1) prefactor amplifies cancellation; callers should use the
/// explicit `One` tag instead.
pub const NEAR_ONE_GUARD: f64 = 1e-4;

/// A Rényi order α ∈ (0, ∞]: a finite value ≠ 1, exactly one, or infinity.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum RenyiOrder {
    Finite(f64),
    One,
    Infinity,
}

impl RenyiOrder {
    /// Validate a finite order: strictly positive, and not within the
    /// near-one guard band (α = 1 exactly maps to the `One` tag).
    pub fn finite(alpha: f64) -> Result<Self, DivergenceError> {
        if !alpha.is_finite() || alpha <= 0.0 {
            return Err(DivergenceError::InvalidOrder(alpha));
        }
        if alpha == 1.0 {
            return Ok(RenyiOrder::One);
        }
        if (alpha - 1.0).abs() <= NEAR_ONE_GUARD {
            return Err(DivergenceError::NearOneOrder(alpha));
        }
        Ok(RenyiOrder::Finite(alpha))
    }

    /// Parse "x", "1", or "inf".
    pub fn parse(text: &str) -> Result<Self, DivergenceError> {
        let t = text.trim();
        match t {
            "1" => Ok(RenyiOrder::One),
            "inf" | "Inf" | "INF" | "infinity" => Ok(RenyiOrder::Infinity),
            _ => {
                let v: f64 = t
                    .parse()
                    .map_err(|_| DivergenceError::UnparsableOrder(t.to_string()))?;
                Self::finite(v)
            }
        }
    }

    pub fn is_finite(&self) -> bool {
        matches!(self, RenyiOrder::Finite(_))
    }

    /// The numeric α for finite orders.
    pub fn alpha(&self) -> Option<f64> {
        match self {
            RenyiOrder::Finite(a) => Some(*a),
            RenyiOrder::One => Some(1.0),
            RenyiOrder::Infinity => None,
        }
    }

    /// α > 1 (including ∞): the range where absolute continuity is required.
    pub fn requires_support_containment(&self) -> bool {
        match self {
            RenyiOrder::Finite(a) => *a > 1.0,
            RenyiOrder::One => true,
            RenyiOrder::Infinity => true,
        }
    }
}

impl fmt::Display for RenyiOrder {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            RenyiOrder::Finite(a) => write!(f, "{a}"),
            RenyiOrder::One => write!(f, "1"),
            RenyiOrder::Infinity => write!(f, "inf"),
        }
    }
}

impl Serialize for RenyiOrder {
    fn serialize<S: serde::Serializer>(&self, ser: S) -> Result<S::Ok, S::Error> {
        match self {
            RenyiOrder::Finite(a) => ser.serialize_f64(*a),
            RenyiOrder::One => ser.serialize_str("1"),
            RenyiOrder::Infinity => ser.serialize_str("inf"),
        }
    }
}

impl<'de> Deserialize<'de> for RenyiOrder {
    fn deserialize<D: serde::Deserializer<'de>>(de: D) -> Result<Self, D::Error> {
        use serde::de::Error;
        #[derive(Deserialize)]
        #[serde(untagged)]
        enum Raw {
            Num(f64),
            Text(String),
        }
        match Raw::deserialize(de)? {
            Raw::Num(v) => RenyiOrder::finite(v).map_err(D::Error::custom),
            Raw::Text(s) => RenyiOrder::parse(&s).map_err(D::Error::custom),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parse_variants() {
        assert_eq!(RenyiOrder::parse("2").unwrap(), RenyiOrder::Finite(2.0));
        assert_eq!(RenyiOrder::parse("1").unwrap(), RenyiOrder::One);
        assert_eq!(RenyiOrder::parse("1.0").unwrap(), RenyiOrder::One);
        assert_eq!(RenyiOrder::parse("inf").unwrap(), RenyiOrder::Infinity);
        assert!(matches!(
            RenyiOrder::parse("0.99995"),
            Err(DivergenceError::NearOneOrder(_))
        ));
        assert!(RenyiOrder::parse("-1").is_err());
        assert!(RenyiOrder::parse("0").is_err());
        assert!(RenyiOrder::parse("abc").is_err());
    }
}
