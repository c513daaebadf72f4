//! Serialized forms shared by every JSON-facing type.
//!
//! Complex numbers travel as `{"re": _, "im": _}`; extended reals as
//! `{"finite": true, "value": _}` or `{"finite": false, "sign": 1}`.

use num_complex::Complex64;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::ratio::{ExtendedReal, StripHalfwidth};

/// `{"re": _, "im": _}`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ComplexRepr {
    pub re: f64,
    pub im: f64,
}

impl From<Complex64> for ComplexRepr {
    fn from(z: Complex64) -> Self {
        Self { re: z.re, im: z.im }
    }
}

impl From<ComplexRepr> for Complex64 {
    fn from(z: ComplexRepr) -> Self {
        Complex64::new(z.re, z.im)
    }
}

/// Field adapter: `#[serde(with = "sphera::wire::complex")]`.
pub mod complex {
    use super::*;

    pub fn serialize<S: Serializer>(z: &Complex64, s: S) -> Result<S::Ok, S::Error> {
        ComplexRepr::from(*z).serialize(s)
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Complex64, D::Error> {
        ComplexRepr::deserialize(d).map(Complex64::from)
    }
}

/// Tagged form of a value in `[−∞, ∞]`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ExtendedRepr {
    pub finite: bool,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub value: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub sign: Option<i8>,
}

impl ExtendedRepr {
    fn finite(value: f64) -> Self {
        Self {
            finite: true,
            value: Some(value),
            sign: None,
        }
    }

    fn pos_infinity() -> Self {
        Self {
            finite: false,
            value: None,
            sign: Some(1),
        }
    }

    fn decode(self) -> Result<Option<f64>, String> {
        match (self.finite, self.value, self.sign) {
            (true, Some(v), None) if v.is_finite() => Ok(Some(v)),
            (false, None, Some(1)) => Ok(None),
            _ => Err(format!("malformed extended real {self:?}")),
        }
    }
}

impl From<ExtendedReal> for ExtendedRepr {
    fn from(x: ExtendedReal) -> Self {
        match x {
            ExtendedReal::Finite(v) => Self::finite(v),
            ExtendedReal::PosInfinity => Self::pos_infinity(),
        }
    }
}

impl TryFrom<ExtendedRepr> for ExtendedReal {
    type Error = String;
    fn try_from(x: ExtendedRepr) -> Result<Self, String> {
        Ok(x.decode()?.map_or(ExtendedReal::PosInfinity, ExtendedReal::Finite))
    }
}

impl From<StripHalfwidth> for ExtendedRepr {
    fn from(x: StripHalfwidth) -> Self {
        match x {
            StripHalfwidth::Finite(v) => Self::finite(v),
            StripHalfwidth::Unbounded => Self::pos_infinity(),
        }
    }
}

impl TryFrom<ExtendedRepr> for StripHalfwidth {
    type Error = String;
    fn try_from(x: ExtendedRepr) -> Result<Self, String> {
        Ok(x.decode()?.map_or(StripHalfwidth::Unbounded, StripHalfwidth::Finite))
    }
}
