//! Weighted `L_2` projection onto `𝒫_n`.

use nalgebra::{DMatrix, DVector};

use super::{check_dimension, residual_norm, ApproxMethod, Basis, PolyApprox};
use crate::chebyshev::{basis_values, ChebSeries};
use crate::error::{Error, Result};
use crate::function::RealFunction;
use crate::numerics::{adapted_rule, JacobiWeight, LpExponent};

/// Gram-matrix condition estimates above this switch to a truncated
/// orthonormal basis.
pub const GRAM_COND_LIMIT: f64 = 1e12;
const RULE_RTOL: f64 = 1e-12;

/// A discretized weighted approximation problem on the nodes of an adapted
/// quadrature rule: residuals `r_j = (f(x_j) - (V c)_j) w(x_j)`.
pub(crate) struct Discrete {
    pub n: usize,
    pub xs: Vec<f64>,
    pub lambda: Vec<f64>,
    /// `w(x_j)`.
    pub wx: Vec<f64>,
    /// Rows `T_i(x_j) w(x_j)`.
    pub vw: DMatrix<f64>,
    /// `f(x_j) w(x_j)`.
    pub fw: DVector<f64>,
    pub scale: f64,
}

impl Discrete {
    pub fn new(f: &RealFunction, n: usize, w: JacobiWeight) -> Result<Self> {
        // resolve f, the weight and polynomials of degree 2n
        let osc = ChebSeries::basis(2 * n);
        let shape = |x: f64| {
            let wx = w.eval(x);
            let fx = f.eval(x);
            let t = osc.eval(x);
            wx * wx * (1.0 + fx * fx + t * t)
        };
        let rule = adapted_rule(-1.0, 1.0, f.singular_points(), &shape, RULE_RTOL)?;
        let mut rows: Vec<(f64, f64, f64, f64)> = Vec::with_capacity(rule.len());
        for (&x, &lam) in rule.nodes.iter().zip(&rule.weights) {
            let wx = w.eval(x);
            let v = f.eval(x) * wx;
            if lam > 0.0 && wx > 0.0 && v.is_finite() && wx.is_finite() {
                rows.push((x, lam, wx, v));
            }
        }
        let m = rows.len();
        let mut vw = DMatrix::<f64>::zeros(m, n);
        let mut t = vec![0.0; n];
        let mut lambda = Vec::with_capacity(m);
        let mut xs = Vec::with_capacity(m);
        let mut wxs = Vec::with_capacity(m);
        let mut fw = DVector::<f64>::zeros(m);
        for (j, &(x, lam, wx, v)) in rows.iter().enumerate() {
            xs.push(x);
            wxs.push(wx);
            basis_values(x, &mut t);
            for (i, ti) in t.iter().enumerate() {
                vw[(j, i)] = ti * wx;
            }
            lambda.push(lam);
            fw[j] = v;
        }
        let scale = fw.iter().fold(0.0_f64, |a, v| a.max(v.abs()));
        Ok(Self {
            n,
            xs,
            lambda,
            wx: wxs,
            vw,
            fw,
            scale,
        })
    }

    pub fn residuals(&self, c: &[f64]) -> DVector<f64> {
        &self.fw - &self.vw * DVector::from_column_slice(c)
    }

    /// Weighted least squares with row weights `ρ_j`: minimizes
    /// `Σ ρ_j r_j²`. Returns the coefficients and the Gram condition estimate.
    pub fn least_squares(&self, rho: &[f64]) -> Result<(Vec<f64>, f64)> {
        let mut a = self.vw.clone();
        let mut b = self.fw.clone();
        for (j, &r) in rho.iter().enumerate() {
            let s = r.sqrt();
            a.row_mut(j).scale_mut(s);
            b[j] *= s;
        }
        let svd = a.svd(true, true);
        let smax = svd.singular_values.max();
        let smin = svd.singular_values.min();
        let cond = if smin > 0.0 {
            (smax / smin).powi(2)
        } else {
            f64::INFINITY
        };
        if !(smax > 0.0) {
            return Err(Error::IllConditionedBasis(cond));
        }
        let eps = if cond > GRAM_COND_LIMIT {
            smax / GRAM_COND_LIMIT.sqrt()
        } else {
            0.0
        };
        let x = svd
            .solve(&b, eps)
            .map_err(|_| Error::IllConditionedBasis(cond))?;
        Ok((x.as_slice().to_vec(), cond))
    }
}

/// Orthogonal projection onto `𝒫_n` in `⟨f, g⟩ = ∫ f g w²`.
pub fn best_weighted_l2(f: &RealFunction, n: usize, w: JacobiWeight) -> Result<PolyApprox> {
    check_dimension(n)?;
    let d = Discrete::new(f, n, w)?;
    let (coeffs, cond) = d.least_squares(&d.lambda)?;
    let err = residual_norm(f, &ChebSeries::new(coeffs.clone()), LpExponent::TWO, w)?;
    Ok(PolyApprox {
        n,
        basis: Basis::Chebyshev,
        coeffs,
        err,
        method: ApproxMethod::ProjectionL2,
        certified: cond <= GRAM_COND_LIMIT,
    })
}
