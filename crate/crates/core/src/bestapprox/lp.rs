//! Discretized weighted `L_p` approximation, `1 ≤ p < ∞`.
//!
//! The objective `Σ λ_j |r_j|^p` over the nodes of an adapted quadrature rule
//! is minimized by damped Newton for `p > 1` and by reweighted least squares
//! followed by Polyak subgradient steps for `p = 1`.

use nalgebra::{DMatrix, DVector};

use super::l2::Discrete;
use super::{check_dimension, residual_norm, ApproxMethod, Basis, PolyApprox};
use crate::chebyshev::ChebSeries;
use crate::error::{Error, Result};
use crate::function::RealFunction;
use crate::numerics::{JacobiWeight, LpExponent};

const NEWTON_ITERS: usize = 200;
const NOISE_REL: f64 = 1e-13;
const HESSIAN_FLOOR: f64 = 1e-4;
const RESTART_AGREEMENT: f64 = 1e-6;
const IRLS_ITERS: usize = 40;
const SUBGRADIENT_ITERS: usize = 300;

/// Minimizer of the discretized objective; `err` is the continuous norm of
/// the winning residual.
pub fn discretized_lp(
    f: &RealFunction,
    n: usize,
    p: LpExponent,
    w: JacobiWeight,
) -> Result<PolyApprox> {
    check_dimension(n)?;
    if p.is_infinite() {
        return Err(Error::InvalidArgument("discretized L_p needs finite p".into()));
    }
    let p_val = p.value();
    let d = Discrete::new(f, n, w)?;
    let (l2, _) = d.least_squares(&d.lambda)?;

    let (coeffs, certified) = if p_val == 1.0 {
        (l1_minimize(&d, l2), false)
    } else {
        let interp = ChebSeries::interpolate(|x| f.eval(x), n).coeffs;
        let perturbed: Vec<f64> = l2
            .iter()
            .enumerate()
            .map(|(j, c)| c * (1.0 + 1e-3 * (j as f64 + 1.0).sin()))
            .collect();
        let starts = [l2, interp, perturbed];
        let finals: Vec<(Vec<f64>, f64)> = starts
            .into_iter()
            .map(|c0| newton(&d, p_val, c0))
            .collect();
        let best = finals
            .iter()
            .map(|f| f.1)
            .fold(f64::INFINITY, f64::min);
        // objectives at the rounding level of the data cannot be compared
        let noise = (NOISE_REL * d.scale).powf(p_val) * d.lambda.iter().sum::<f64>();
        let agree = finals
            .iter()
            .all(|f| f.1 <= (1.0 + RESTART_AGREEMENT) * best + noise);
        let winner = finals
            .into_iter()
            .find(|f| f.1 == best)
            .map(|f| f.0)
            .expect("three restarts");
        (winner, agree)
    };
    let err = residual_norm(f, &ChebSeries::new(coeffs.clone()), p, w)?;
    Ok(PolyApprox {
        n,
        basis: Basis::Chebyshev,
        coeffs,
        err,
        method: ApproxMethod::DiscretizedLp,
        certified,
    })
}

fn objective(d: &Discrete, p: f64, r: &DVector<f64>) -> f64 {
    r.iter()
        .zip(&d.lambda)
        .map(|(ri, l)| l * ri.abs().powf(p))
        .sum()
}

fn newton(d: &Discrete, p: f64, c0: Vec<f64>) -> (Vec<f64>, f64) {
    let n = d.n;
    let mut c = DVector::from_vec(c0);
    let mut r = d.residuals(c.as_slice());
    let mut val = objective(d, p, &r);
    let kappa = if p < 2.0 { p } else { p * (p - 1.0) };
    for _ in 0..NEWTON_ITERS {
        if val == 0.0 {
            break;
        }
        // curvature is floored relative to the current residual size
        let r_max = r.iter().fold(0.0_f64, |m, v| m.max(v.abs()));
        let eps2 = (HESSIAN_FLOOR * r_max).max(1e-300).powi(2);
        // gradient -V^T (λ p |r|^{p-1} sgn r); curvature V^T diag(λ κ (r²+ε²)^{(p-2)/2}) V
        // with κ = p(p-1) (Newton) for p ≥ 2 and κ = p (the reweighted
        // least-squares majorizer) for p < 2, where Newton oscillates
        let m = r.len();
        let mut g_w = DVector::<f64>::zeros(m);
        let mut h_w = DVector::<f64>::zeros(m);
        for j in 0..m {
            let rj = r[j];
            g_w[j] = d.lambda[j] * p * rj.abs().powf(p - 1.0) * rj.signum();
            h_w[j] = d.lambda[j] * kappa * (rj * rj + eps2).powf(0.5 * (p - 2.0));
        }
        let grad = -(d.vw.transpose() * &g_w);
        let mut scaled = d.vw.clone();
        for j in 0..m {
            scaled.row_mut(j).scale_mut(h_w[j].sqrt());
        }
        let hess: DMatrix<f64> = scaled.transpose() * &scaled;
        let diag_mean = (0..n).map(|i| hess[(i, i)]).sum::<f64>() / n as f64;
        let mut mu = 1e-12 * diag_mean.max(f64::MIN_POSITIVE);
        let step = loop {
            let mut hm = hess.clone();
            for i in 0..n {
                hm[(i, i)] += mu * hess[(i, i)].max(diag_mean * 1e-6);
            }
            if let Some(ch) = hm.cholesky() {
                break Some(ch.solve(&(-&grad)));
            }
            mu *= 100.0;
            if mu > 1e6 * diag_mean {
                break None;
            }
        };
        let Some(step) = step else { break };
        let slope = grad.dot(&step);
        if !(slope < 0.0) {
            break;
        }
        let mut alpha = 1.0;
        let mut accepted = None;
        while alpha > 1e-12 {
            let trial = &c + alpha * &step;
            let tr = d.residuals(trial.as_slice());
            let tv = objective(d, p, &tr);
            if tv <= val + 1e-4 * alpha * slope {
                accepted = Some((trial, tr, tv));
                break;
            }
            alpha *= 0.5;
        }
        let Some((trial, tr, tv)) = accepted else { break };
        let gain = val - tv;
        c = trial;
        r = tr;
        val = tv;
        if gain <= 1e-15 * val {
            break;
        }
    }
    (c.as_slice().to_vec(), val)
}

fn l1_minimize(d: &Discrete, l2: Vec<f64>) -> Vec<f64> {
    let delta = 1e-12 * d.scale.max(f64::MIN_POSITIVE);
    let mut best_c = l2.clone();
    let mut best_v = objective(d, 1.0, &d.residuals(&l2));

    // reweighted least squares
    let mut c = l2;
    for _ in 0..IRLS_ITERS {
        let r = d.residuals(&c);
        let rho: Vec<f64> = r
            .iter()
            .zip(&d.lambda)
            .map(|(ri, l)| l / ri.abs().max(delta))
            .collect();
        let Ok((next, _)) = d.least_squares(&rho) else {
            break;
        };
        let v = objective(d, 1.0, &d.residuals(&next));
        c = next;
        if v < best_v {
            best_v = v;
            best_c = c.clone();
        }
    }

    // Polyak steps towards a slowly tightening target
    let mut c = DVector::from_vec(best_c.clone());
    for it in 0..SUBGRADIENT_ITERS {
        let r = d.residuals(c.as_slice());
        let v = objective(d, 1.0, &r);
        if v < best_v {
            best_v = v;
            best_c = c.as_slice().to_vec();
        }
        let s: DVector<f64> = DVector::from_iterator(
            r.len(),
            r.iter().zip(&d.lambda).map(|(ri, l)| l * ri.signum()),
        );
        let g = -(d.vw.transpose() * s);
        let gg = g.norm_squared();
        if gg == 0.0 || best_v == 0.0 {
            break;
        }
        let target = best_v * (1.0 - 1e-3 / (1.0 + it as f64));
        c -= ((v - target) / gg) * g;
    }
    best_c
}
