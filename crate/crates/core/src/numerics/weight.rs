use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};

/// Smallest weight exponent accepted by the quadrature: `γ > -1 + 1e-6`.
pub const MIN_WEIGHT_EXPONENT: f64 = -1.0 + 1e-6;

/// The exponent `p ∈ [1, ∞]` of an `L_p` norm.
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd)]
pub struct LpExponent(f64);

impl LpExponent {
    pub const ONE: Self = Self(1.0);
    pub const TWO: Self = Self(2.0);
    pub const INF: Self = Self(f64::INFINITY);

    pub fn new(p: f64) -> Result<Self> {
        if p >= 1.0 {
            Ok(Self(p))
        } else {
            Err(Error::InvalidArgument(format!("p must be >= 1, got {p}")))
        }
    }

    pub fn value(self) -> f64 {
        self.0
    }

    pub fn is_infinite(self) -> bool {
        self.0.is_infinite()
    }

    /// `q = min(2, p)`.
    pub fn marchaud_q(self) -> f64 {
        self.0.min(2.0)
    }

    /// `s = max(p, 2)`.
    pub fn jackson_s(self) -> f64 {
        self.0.max(2.0)
    }
}

impl fmt::Display for LpExponent {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_infinite() {
            f.write_str("inf")
        } else {
            write!(f, "{}", self.0)
        }
    }
}

impl FromStr for LpExponent {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim() {
            "inf" | "infinity" | "∞" => Ok(Self::INF),
            other => other
                .parse::<f64>()
                .map_err(|_| Error::InvalidArgument(format!("bad exponent {other:?}")))
                .and_then(Self::new),
        }
    }
}

impl Serialize for LpExponent {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        if self.is_infinite() {
            s.serialize_str("inf")
        } else {
            s.serialize_f64(self.0)
        }
    }
}

impl<'de> Deserialize<'de> for LpExponent {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        #[derive(Deserialize)]
        #[serde(untagged)]
        enum Raw {
            Num(f64),
            Str(String),
        }
        let parsed = match Raw::deserialize(d)? {
            Raw::Num(p) => LpExponent::new(p),
            Raw::Str(s) => s.parse(),
        };
        parsed.map_err(serde::de::Error::custom)
    }
}

/// Jacobi weight `w(x) = (1 - x)^α (1 + x)^β`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct JacobiWeight {
    pub alpha: f64,
    pub beta: f64,
}

impl JacobiWeight {
    pub const UNIT: Self = Self {
        alpha: 0.0,
        beta: 0.0,
    };

    pub fn new(alpha: f64, beta: f64) -> Result<Self> {
        for e in [alpha, beta] {
            if !(e > MIN_WEIGHT_EXPONENT) {
                return Err(Error::WeightExponent(e));
            }
        }
        Ok(Self { alpha, beta })
    }

    /// `φ^r` as a Jacobi weight.
    pub fn phi_pow(r: usize) -> Self {
        Self::UNIT.times_phi_pow(r)
    }

    /// `w φ^r = w_{α + r/2, β + r/2}`.
    pub fn times_phi_pow(self, r: usize) -> Self {
        let h = r as f64 / 2.0;
        Self {
            alpha: self.alpha + h,
            beta: self.beta + h,
        }
    }

    pub fn is_unit(self) -> bool {
        self.alpha == 0.0 && self.beta == 0.0
    }

    #[inline]
    pub fn eval(self, x: f64) -> f64 {
        pow0(1.0 - x, self.alpha) * pow0(1.0 + x, self.beta)
    }
}

impl Default for JacobiWeight {
    fn default() -> Self {
        Self::UNIT
    }
}

impl fmt::Display for JacobiWeight {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "w_{{{},{}}}", self.alpha, self.beta)
    }
}

// `u^e` with `u^0 = 1` and negative rounding noise clamped to zero.
#[inline]
fn pow0(u: f64, e: f64) -> f64 {
    if e == 0.0 {
        1.0
    } else if e == 1.0 {
        u.max(0.0)
    } else {
        u.max(0.0).powf(e)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn exponent_rules() {
        let p15 = LpExponent::new(1.5).unwrap();
        let p3 = LpExponent::new(3.0).unwrap();
        assert_eq!(p15.marchaud_q(), 1.5);
        assert_eq!(p3.marchaud_q(), 2.0);
        assert_eq!(p15.jackson_s(), 2.0);
        assert_eq!(p3.jackson_s(), 3.0);
        assert!(LpExponent::new(0.5).is_err());
        assert!("inf".parse::<LpExponent>().unwrap().is_infinite());
    }

    #[test]
    fn weight_algebra() {
        let w = JacobiWeight::new(0.5, 0.0).unwrap().times_phi_pow(2);
        assert_eq!(w, JacobiWeight { alpha: 1.5, beta: 1.0 });
        assert!(JacobiWeight::new(-1.0, 0.0).is_err());
        assert!(JacobiWeight::new(-0.5, 0.0).is_ok());
        assert_eq!(JacobiWeight::UNIT.eval(1.0), 1.0);
    }

    #[test]
    fn exponent_serde() {
        let v: Vec<LpExponent> = serde_json::from_str(r#"[1, 2.5, "inf"]"#).unwrap();
        assert_eq!(v[1].value(), 2.5);
        assert!(v[2].is_infinite());
        assert_eq!(serde_json::to_string(&v).unwrap(), r#"[1.0,2.5,"inf"]"#);
    }
}
