//! Test functions on `[-1, 1]` with exact derivatives and known smoothness.
//!
//! Every member carries closed-form derivatives up to `max_order`. At a
//! singular point an evaluator returns the average of the one-sided limits
//! when both are finite and `+∞` otherwise.

use std::fmt;

use crate::chebyshev::ChebSeries;
use crate::error::{Error, Result};
use crate::function::RealFunction;
use crate::numerics::{JacobiWeight, LpExponent};

/// How a corpus member is built.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Family {
    /// Chebyshev polynomial `T_d`.
    ChebPoly { degree: usize },
    /// `|x|^α`.
    AbsPow { alpha: f64 },
    /// `(1 - x)^γ`.
    OneMinusPow { gamma: f64 },
    /// `(x)_+^α`.
    TruncPow { alpha: f64 },
    Exp,
    /// `sin(ω x)`.
    Sin { freq: f64 },
}

#[derive(Debug, Clone)]
pub struct FunctionSpec {
    pub id: String,
    pub family: Family,
    pub max_order: usize,
    pub singular_points: Vec<f64>,
    /// Decay exponent of the uniform best-approximation error, when finite.
    pub alpha_hint: Option<f64>,
}

const SMOOTH_MAX_ORDER: usize = 12;
const ENDPOINT_MAX_ORDER: usize = 4;

const ABS_POWERS: [f64; 5] = [0.5, 1.0, 1.5, 2.5, 3.5];
const ENDPOINT_POWERS: [f64; 3] = [0.5, 1.5, 2.5];
const TRUNC_POWERS: [f64; 2] = [1.5, 2.5];

fn all_families() -> Vec<Family> {
    let mut out: Vec<Family> = (0..=10).map(|degree| Family::ChebPoly { degree }).collect();
    out.extend(ABS_POWERS.iter().map(|&alpha| Family::AbsPow { alpha }));
    out.extend(ENDPOINT_POWERS.iter().map(|&gamma| Family::OneMinusPow { gamma }));
    out.push(Family::Exp);
    out.push(Family::Sin { freq: 5.0 });
    out.extend(TRUNC_POWERS.iter().map(|&alpha| Family::TruncPow { alpha }));
    out
}

/// Ids of every corpus member, in a stable order.
pub fn corpus_list() -> Vec<String> {
    all_families().into_iter().map(|f| family_id(&f)).collect()
}

pub fn corpus_get(id: &str) -> Result<FunctionSpec> {
    all_families()
        .into_iter()
        .find(|f| family_id(f) == id)
        .map(FunctionSpec::from_family)
        .ok_or_else(|| Error::UnknownFunction(id.to_string()))
}

fn family_id(f: &Family) -> String {
    match *f {
        Family::ChebPoly { degree } => format!("poly_cheb_{degree}"),
        Family::AbsPow { alpha } => format!("abs_pow_{alpha}"),
        Family::OneMinusPow { gamma } => format!("one_minus_x_pow_{gamma}"),
        Family::TruncPow { alpha } => format!("trunc_pow_{alpha}"),
        Family::Exp => "exp".into(),
        Family::Sin { freq } => format!("sin_{freq}x"),
    }
}

// ceil for the power families: the largest r with f^{(r-1)} ∈ AC_loc.
fn power_max_order(alpha: f64) -> usize {
    alpha.ceil() as usize
}

impl FunctionSpec {
    pub fn from_family(family: Family) -> Self {
        let (max_order, singular_points) = match family {
            Family::ChebPoly { .. } | Family::Exp | Family::Sin { .. } => {
                (SMOOTH_MAX_ORDER, vec![])
            }
            Family::AbsPow { alpha } | Family::TruncPow { alpha } => {
                (power_max_order(alpha), vec![0.0])
            }
            Family::OneMinusPow { .. } => (ENDPOINT_MAX_ORDER, vec![1.0]),
        };
        let mut spec = Self {
            id: family_id(&family),
            family,
            max_order,
            singular_points,
            alpha_hint: None,
        };
        spec.alpha_hint = spec.alpha_for(LpExponent::INF);
        spec
    }

    pub fn eval(&self, x: f64) -> f64 {
        derivative_value(self.family, 0, x)
    }

    /// The exact `j`-th derivative, or `None` above `max_order`.
    pub fn deriv(&self, j: usize) -> Option<RealFunction> {
        if j > self.max_order {
            return None;
        }
        let family = self.family;
        let f = match family {
            Family::ChebPoly { degree } => {
                let s = ChebSeries::basis(degree).nth_derivative(j);
                RealFunction::new(move |x| s.eval(x))
            }
            _ => RealFunction::new(move |x| derivative_value(family, j, x)),
        };
        Some(f.with_singular_points(&self.singular_points))
    }

    pub fn function(&self) -> RealFunction {
        self.deriv(0).expect("order 0 always exists")
    }

    /// Degree when the member is a polynomial.
    pub fn polynomial_degree(&self) -> Option<usize> {
        match self.family {
            Family::ChebPoly { degree } => Some(degree),
            _ => None,
        }
    }

    /// Whether `f ∈ B^r_p`: `f^{(r-1)}` locally absolutely continuous and
    /// `‖f^{(r)} φ^r‖_p < ∞`; for `p = ∞`, `f^{(r)}` continuous on `(-1, 1)`
    /// with `f^{(r)} φ^r → 0` at `±1`. `B^0_p` is `L_p` (`C[-1,1]` for `p = ∞`).
    pub fn b_rp_member(&self, r: usize, p: LpExponent) -> bool {
        if r > self.max_order {
            return false;
        }
        if r == 0 {
            return true;
        }
        let integrable = |e: f64| {
            if p.is_infinite() {
                e > 0.0
            } else {
                e >= 0.0 || e * p.value() > -1.0
            }
        };
        match self.family {
            Family::ChebPoly { .. } | Family::Exp | Family::Sin { .. } => true,
            Family::AbsPow { alpha } | Family::TruncPow { alpha } => integrable(alpha - r as f64),
            Family::OneMinusPow { gamma } => integrable(gamma - r as f64 / 2.0),
        }
    }

    /// Exponent `α` with `E_n(f)_p ≍ n^{-α}`, for members of finite smoothness.
    pub fn alpha_for(&self, p: LpExponent) -> Option<f64> {
        self.alpha_for_weighted(p, JacobiWeight::UNIT)
    }

    /// As [`Self::alpha_for`] in the norm `‖w ·‖_p`. Interior singularities
    /// are unaffected by the weight; an endpoint power `(1-x)^γ` gains the
    /// weight exponent at `x = 1`.
    pub fn alpha_for_weighted(&self, p: LpExponent, w: JacobiWeight) -> Option<f64> {
        let inv_p = if p.is_infinite() { 0.0 } else { 1.0 / p.value() };
        match self.family {
            Family::AbsPow { alpha } if alpha.fract() != 0.0 || alpha as i64 % 2 == 1 => {
                Some(alpha + inv_p)
            }
            Family::TruncPow { alpha } => Some(alpha + inv_p),
            Family::OneMinusPow { gamma } => Some(2.0 * (gamma + w.alpha) + 2.0 * inv_p),
            _ => None,
        }
    }
}

impl fmt::Display for FunctionSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let hint = self
            .alpha_hint
            .map_or_else(|| "-".to_string(), |a| a.to_string());
        let sing = if self.singular_points.is_empty() {
            "-".to_string()
        } else {
            self.singular_points
                .iter()
                .map(|s| s.to_string())
                .collect::<Vec<_>>()
                .join(",")
        };
        write!(f, "{}\t{}\t{}\t{}", self.id, self.max_order, hint, sing)
    }
}

/// `α (α-1) … (α-j+1)`.
fn falling(alpha: f64, j: usize) -> f64 {
    (0..j).map(|i| alpha - i as f64).product()
}

/// `u^e` for `u > 0` with fast paths for integer and half-integer `e`.
#[inline]
fn pow_pos(u: f64, e: f64) -> f64 {
    if e == 0.0 {
        return 1.0;
    }
    let twice = 2.0 * e;
    if twice.fract() == 0.0 && twice.abs() < 64.0 {
        let n = twice as i32;
        if n % 2 == 0 {
            u.powi(n / 2)
        } else {
            u.sqrt().powi(n)
        }
    } else {
        u.powf(e)
    }
}

// Value of `u^e` at `u = 0` under the averaging convention for one-sided
// families: finite limits 0 or 1, otherwise unbounded.
fn at_zero(e: f64) -> f64 {
    if e > 0.0 {
        0.0
    } else if e == 0.0 {
        1.0
    } else {
        f64::INFINITY
    }
}

fn derivative_value(family: Family, j: usize, x: f64) -> f64 {
    match family {
        Family::ChebPoly { degree } => ChebSeries::basis(degree).nth_derivative(j).eval(x),
        Family::Exp => x.exp(),
        Family::Sin { freq } => {
            freq.powi(j as i32) * (freq * x + j as f64 * std::f64::consts::FRAC_PI_2).sin()
        }
        Family::AbsPow { alpha } => {
            let c = falling(alpha, j);
            if c == 0.0 {
                return 0.0;
            }
            let e = alpha - j as f64;
            if x == 0.0 {
                if e == 0.0 && j % 2 == 1 {
                    return 0.0; // sign jump: average of ±c
                }
                return c * at_zero(e);
            }
            let s = if j % 2 == 1 && x < 0.0 { -1.0 } else { 1.0 };
            s * c * pow_pos(x.abs(), e)
        }
        Family::TruncPow { alpha } => {
            let c = falling(alpha, j);
            let e = alpha - j as f64;
            if x < 0.0 || c == 0.0 {
                0.0
            } else if x == 0.0 {
                match at_zero(e) {
                    v if v.is_infinite() => v,
                    v => 0.5 * c * v,
                }
            } else {
                c * pow_pos(x, e)
            }
        }
        Family::OneMinusPow { gamma } => {
            let c = falling(gamma, j) * if j % 2 == 1 { -1.0 } else { 1.0 };
            if c == 0.0 {
                return 0.0;
            }
            let u = 1.0 - x;
            let e = gamma - j as f64;
            if u <= 0.0 {
                c * at_zero(e)
            } else {
                c * pow_pos(u, e)
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn listed_members() {
        let ids = corpus_list();
        assert!(ids.len() >= 20);
        for id in ["abs_pow_1.5", "poly_cheb_4", "abs_pow_0.5", "abs_pow_1", "abs_pow_2.5"] {
            assert!(ids.iter().any(|s| s == id), "{id}");
        }
        for id in ["one_minus_x_pow_0.5", "one_minus_x_pow_1.5", "exp", "sin_5x"] {
            assert!(ids.iter().any(|s| s == id), "{id}");
        }
        assert!(ids.iter().any(|s| s == "trunc_pow_1.5"));
        assert!(ids.iter().any(|s| s == "trunc_pow_2.5"));
        for d in 0..=10 {
            assert!(ids.contains(&format!("poly_cheb_{d}")));
        }
    }

    #[test]
    fn values() {
        let f = corpus_get("abs_pow_1.5").unwrap();
        assert!((f.eval(0.5) - 0.353_553_390_593_273_8).abs() < 1e-15);
        let g = corpus_get("one_minus_x_pow_0.5").unwrap();
        assert_eq!(g.deriv(1).unwrap().eval(0.0), -0.5);
        assert_eq!(
            corpus_get("nope").unwrap_err().to_string(),
            "no such corpus function: nope"
        );
    }

    #[test]
    fn singular_point_conventions() {
        let abs1 = corpus_get("abs_pow_1").unwrap();
        assert_eq!(abs1.deriv(1).unwrap().eval(0.0), 0.0);
        let half = corpus_get("abs_pow_0.5").unwrap();
        assert!(half.deriv(1).unwrap().eval(0.0).is_infinite());
        let tp = corpus_get("trunc_pow_1.5").unwrap();
        assert_eq!(tp.deriv(1).unwrap().eval(0.0), 0.0);
        assert!(tp.deriv(2).unwrap().eval(0.0).is_infinite());
        let om = corpus_get("one_minus_x_pow_1.5").unwrap();
        assert_eq!(om.deriv(1).unwrap().eval(1.0), 0.0);
        assert!(om.deriv(2).unwrap().eval(1.0).is_infinite());
    }

    #[test]
    fn abs_pow_half_not_in_b1_inf() {
        // f'(x) φ(x) at x = 10^{-j} grows without bound
        let f = corpus_get("abs_pow_0.5").unwrap();
        let d = f.deriv(1).unwrap();
        let vals: Vec<f64> = (1..=12)
            .map(|j| {
                let x = 10f64.powi(-j);
                (d.eval(x) * crate::phi(x)).abs()
            })
            .collect();
        assert!(vals.windows(2).all(|w| w[1] > w[0]));
        assert!(vals[11] > 1e5);
        assert!(!f.b_rp_member(1, LpExponent::INF));
        assert!(f.b_rp_member(1, LpExponent::ONE));
        assert!(!f.b_rp_member(1, LpExponent::TWO));
    }

    #[test]
    fn endpoint_membership() {
        let g = corpus_get("one_minus_x_pow_0.5").unwrap();
        // f'φ → -√2/2 at x = 1, so the vanishing condition fails for p = ∞
        assert!(!g.b_rp_member(1, LpExponent::INF));
        assert!(g.b_rp_member(1, LpExponent::TWO));
        let h = corpus_get("one_minus_x_pow_1.5").unwrap();
        assert!(h.b_rp_member(2, LpExponent::INF));
        assert!(!h.b_rp_member(3, LpExponent::INF));
    }

    #[test]
    fn alpha_hints() {
        assert_eq!(corpus_get("abs_pow_1.5").unwrap().alpha_hint, Some(1.5));
        assert_eq!(corpus_get("one_minus_x_pow_0.5").unwrap().alpha_hint, Some(1.0));
        assert_eq!(corpus_get("exp").unwrap().alpha_hint, None);
        assert_eq!(corpus_get("poly_cheb_3").unwrap().alpha_hint, None);
        let w = JacobiWeight::new(0.5, 0.0).unwrap();
        let a = corpus_get("one_minus_x_pow_0.5")
            .unwrap()
            .alpha_for_weighted(LpExponent::TWO, w);
        assert_eq!(a, Some(3.0));
    }

    #[test]
    fn tsv_line() {
        let f = corpus_get("abs_pow_2.5").unwrap();
        assert_eq!(f.to_string(), "abs_pow_2.5\t3\t2.5\t0");
        assert_eq!(corpus_get("exp").unwrap().to_string(), "exp\t12\t-\t-");
    }
}
