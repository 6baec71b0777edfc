//! Best polynomial approximation in `𝒫_n`, the polynomials of degree `< n`,
//! in uniform, weighted `L_2` and weighted `L_p` norms.
//!
//! Polynomials are kept in the Chebyshev basis throughout.

pub(crate) mod l2;
mod lp;
mod remez;

use std::fmt;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::chebyshev::ChebSeries;
use crate::error::{Error, Result};
use crate::function::RealFunction;
use crate::numerics::{weighted_lp_norm, JacobiWeight, LpExponent, NormQuery};

pub use l2::best_weighted_l2;
pub use lp::discretized_lp;
pub use remez::{best_uniform, best_weighted_uniform, REMEZ_MAX_ITERS};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum ApproxMethod {
    Remez,
    #[serde(rename = "PROJECTION_L2")]
    ProjectionL2,
    DiscretizedLp,
}

impl fmt::Display for ApproxMethod {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Self::Remez => "REMEZ",
            Self::ProjectionL2 => "PROJECTION_L2",
            Self::DiscretizedLp => "DISCRETIZED_LP",
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Basis {
    Chebyshev,
}

/// A polynomial of degree `< n` and its achieved error `‖(f - P) w‖_p`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PolyApprox {
    pub n: usize,
    pub basis: Basis,
    pub coeffs: Vec<f64>,
    pub err: f64,
    pub method: ApproxMethod,
    pub certified: bool,
}

impl PolyApprox {
    pub fn series(&self) -> ChebSeries {
        ChebSeries::new(self.coeffs.clone())
    }

    #[inline]
    pub fn eval(&self, x: f64) -> f64 {
        crate::chebyshev::clenshaw(&self.coeffs, x)
    }

    /// The same polynomial regarded as an element of `𝒫_m`, `m ≥ n`.
    pub fn padded(&self, m: usize) -> Self {
        let mut out = self.clone();
        out.coeffs.resize(m.max(self.n), 0.0);
        out.n = m.max(self.n);
        out
    }
}

/// `E_n(f)_{w,p}` with its approximant: Remez for `p = ∞`, projection for
/// `p = 2`, discretized minimization otherwise.
pub fn best_weighted_lp(
    f: &RealFunction,
    n: usize,
    p: LpExponent,
    w: JacobiWeight,
) -> Result<PolyApprox> {
    if p.is_infinite() {
        best_weighted_uniform(f, n, w)
    } else if p.value() == 2.0 {
        best_weighted_l2(f, n, w)
    } else {
        discretized_lp(f, n, p, w)
    }
}

/// Approximants for `n = n_lo..=n_hi`. Because the spaces are nested, an
/// approximant for `n` is admissible for every larger `n`; the returned
/// sequence uses the better of the two, so it is nonincreasing.
pub fn en_approximants(
    f: &RealFunction,
    n_lo: usize,
    n_hi: usize,
    p: LpExponent,
    w: JacobiWeight,
) -> Result<Vec<PolyApprox>> {
    if n_lo == 0 || n_hi < n_lo {
        return Err(Error::InvalidArgument(format!(
            "degree range {n_lo}..={n_hi} must start at 1"
        )));
    }
    let ns: Vec<usize> = (n_lo..=n_hi).collect();
    en_approximants_at(f, &ns, p, w)
}

/// As [`en_approximants`] at a strictly increasing list of dimensions.
pub fn en_approximants_at(
    f: &RealFunction,
    ns: &[usize],
    p: LpExponent,
    w: JacobiWeight,
) -> Result<Vec<PolyApprox>> {
    if ns.is_empty() || ns[0] == 0 || ns.windows(2).any(|d| d[1] <= d[0]) {
        return Err(Error::InvalidArgument(
            "dimensions must be positive and strictly increasing".into(),
        ));
    }
    let raw = ns
        .par_iter()
        .map(|&n| best_weighted_lp(f, n, p, w))
        .collect::<Result<Vec<_>>>()?;
    let mut out: Vec<PolyApprox> = Vec::with_capacity(raw.len());
    for a in raw {
        match out.last() {
            Some(prev) if prev.err < a.err => {
                let mut kept = prev.padded(a.n);
                kept.certified = false;
                out.push(kept);
            }
            _ => out.push(a),
        }
    }
    Ok(out)
}

/// `(n, E_n(f)_{w,p})` for `n = n_lo..=n_hi`.
pub fn en_sequence(
    f: &RealFunction,
    n_lo: usize,
    n_hi: usize,
    p: LpExponent,
    w: JacobiWeight,
) -> Result<Vec<(usize, f64)>> {
    Ok(en_approximants(f, n_lo, n_hi, p, w)?
        .into_iter()
        .map(|a| (a.n, a.err))
        .collect())
}

/// `‖φ^m P^{(m)}‖_p`; zero when `m ≥ n`.
pub fn poly_derivative_weighted_norm(poly: &PolyApprox, m: usize, p: LpExponent) -> Result<f64> {
    series_derivative_norm(&poly.series(), m, p, JacobiWeight::UNIT)
}

/// `‖w φ^m S^{(m)}‖_p` for a Chebyshev series `S`.
pub fn series_derivative_norm(
    s: &ChebSeries,
    m: usize,
    p: LpExponent,
    w: JacobiWeight,
) -> Result<f64> {
    if m >= s.len() {
        return Ok(0.0);
    }
    let d = s.nth_derivative(m);
    let weight = w.times_phi_pow(m);
    let g = |x: f64| d.eval(x);
    let wf = |x: f64| weight.eval(x);
    let scale: f64 = d.coeffs.iter().map(|c| c.abs()).sum();
    weighted_lp_norm(
        &NormQuery::new(&g, p)
            .weight(&wf)
            .abs_floor(1e-15 * scale),
    )
}

/// Continuous `‖(f - S) w‖_p`.
pub fn residual_norm(
    f: &RealFunction,
    s: &ChebSeries,
    p: LpExponent,
    w: JacobiWeight,
) -> Result<f64> {
    let g = |x: f64| f.eval(x) - s.eval(x);
    let wf = |x: f64| w.eval(x);
    weighted_lp_norm(
        &NormQuery::new(&g, p)
            .weight(&wf)
            .breakpoints(f.singular_points())
            .abs_floor(1e-15 * f.scale(w).max(f64::MIN_POSITIVE)),
    )
}

fn check_dimension(n: usize) -> Result<()> {
    if n == 0 {
        Err(Error::InvalidArgument("approximation space needs n >= 1".into()))
    } else {
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn json_shape() {
        let a = PolyApprox {
            n: 2,
            basis: Basis::Chebyshev,
            coeffs: vec![0.5, 0.0],
            err: 0.5,
            method: ApproxMethod::Remez,
            certified: true,
        };
        assert_eq!(
            serde_json::to_string(&a).unwrap(),
            r#"{"n":2,"basis":"chebyshev","coeffs":[0.5,0.0],"err":0.5,"method":"REMEZ","certified":true}"#
        );
        let back: PolyApprox = serde_json::from_str(&serde_json::to_string(&a).unwrap()).unwrap();
        assert_eq!(back, a);
        assert_eq!(
            serde_json::to_string(&ApproxMethod::ProjectionL2).unwrap(),
            "\"PROJECTION_L2\""
        );
        assert_eq!(
            serde_json::to_string(&ApproxMethod::DiscretizedLp).unwrap(),
            "\"DISCRETIZED_LP\""
        );
    }

    #[test]
    fn derivative_norms() {
        let t3 = PolyApprox {
            n: 4,
            basis: Basis::Chebyshev,
            coeffs: vec![0.0, 0.0, 0.0, 1.0],
            err: 0.0,
            method: ApproxMethod::ProjectionL2,
            certified: true,
        };
        assert_eq!(poly_derivative_weighted_norm(&t3, 4, LpExponent::INF).unwrap(), 0.0);
        // φ T_3' = 3 sin 3θ
        let v = poly_derivative_weighted_norm(&t3, 1, LpExponent::INF).unwrap();
        assert!((v - 3.0).abs() < 1e-12, "{v}");
        let sq = PolyApprox {
            coeffs: vec![0.5, 0.0, 0.5],
            n: 3,
            ..t3
        };
        let v = poly_derivative_weighted_norm(&sq, 2, LpExponent::TWO).unwrap();
        assert!((v - 2.0 * (16.0f64 / 15.0).sqrt()).abs() < 1e-12);
    }

    #[test]
    fn sequences() {
        let inf = LpExponent::INF;
        let unit = JacobiWeight::UNIT;
        // against the degree n - 1 the classical order of |x|^1.5 shows up
        let f = crate::corpus::corpus_get("abs_pow_1.5").unwrap().function();
        let seq = en_sequence(&f, 8, 64, inf, unit).unwrap();
        assert!(seq.windows(2).all(|w| w[1].1 <= w[0].1 + 1e-10));
        let deg: Vec<f64> = seq.iter().map(|s| (s.0 - 1) as f64).collect();
        let e: Vec<f64> = seq.iter().map(|s| s.1).collect();
        let slope = crate::numerics::fit_loglog_slope(&deg, &e).unwrap().slope;
        assert!((slope + 1.5).abs() < 0.1, "{slope}");

        let cubic = RealFunction::new(|x| x * x * x - x);
        let seq = en_sequence(&cubic, 1, 6, inf, unit).unwrap();
        assert!(seq[..3].iter().all(|s| s.1 > 0.1));
        assert!(seq[3..].iter().all(|s| s.1 < 1e-12), "{seq:?}");

        // log E_n of exp is concave in n: each step drops faster than the last
        let seq = en_sequence(&RealFunction::new(f64::exp), 1, 10, inf, unit).unwrap();
        let drops: Vec<f64> = seq.windows(2).map(|w| (w[0].1 / w[1].1).ln()).collect();
        assert!(drops.windows(2).all(|d| d[1] > d[0]), "{drops:?}");
    }
}
