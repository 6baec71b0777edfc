//! Shared numerics of the checks.

use crate::bestapprox::en_approximants_at;
use crate::corpus::FunctionSpec;
use crate::error::{Error, Result};
use crate::function::RealFunction;
use crate::moduli::{ModulusKind, ModulusQuery};
use crate::numerics::{fit_loglog_slope, JacobiWeight, LpExponent};

use super::report::HarnessConfig;

pub(crate) fn deriv(f: &FunctionSpec, r: usize) -> Result<RealFunction> {
    f.deriv(r)
        .ok_or_else(|| Error::InvalidArgument(format!("{} lacks derivative {r}", f.id)))
}

pub(crate) fn zero_floor(f: &FunctionSpec, cfg: &HarnessConfig) -> f64 {
    cfg.zero_rel * f.function().scale(JacobiWeight::UNIT).max(f64::MIN_POSITIVE)
}

/// A modulus of order `k` along increasing `ts`. Beyond `2/k` no step has
/// a nonempty support, so the value there is the value at `2/k`.
fn capped_sweep(q: ModulusQuery, f: &RealFunction, ts: &[f64]) -> Result<Vec<f64>> {
    let cap = 2.0 / q.k as f64;
    let mut inside: Vec<f64> = ts.iter().copied().filter(|&t| t <= cap).collect();
    let capped = inside.len() < ts.len();
    if capped && inside.last().is_none_or(|&t| t < cap) {
        inside.push(cap);
    }
    let vals = q.sweep(f, &inside)?;
    let last = *vals.last().unwrap_or(&0.0);
    Ok((0..ts.len()).map(|i| vals.get(i).copied().filter(|_| ts[i] <= cap).unwrap_or(last)).collect())
}

/// `ω^φ_{k,r}(fr, t)_p` for each `t` of an increasing sequence.
pub(crate) fn new_sweep(
    fr: &RealFunction,
    k: usize,
    r: usize,
    p: LpExponent,
    ts: &[f64],
) -> Result<Vec<f64>> {
    capped_sweep(ModulusQuery::new(ModulusKind::New, k, p, ts[0]).with_r(r), fr, ts)
}

/// `ω^φ_k(f, t)_p`.
pub(crate) fn dt_sweep(f: &RealFunction, k: usize, p: LpExponent, ts: &[f64]) -> Result<Vec<f64>> {
    capped_sweep(ModulusQuery::new(ModulusKind::Dt, k, p, ts[0]), f, ts)
}

/// `ω^φ_k(f, t)_{w,p}`.
pub(crate) fn weighted_sweep(
    f: &RealFunction,
    k: usize,
    w: JacobiWeight,
    p: LpExponent,
    ts: &[f64],
) -> Result<Vec<f64>> {
    ModulusQuery::new(ModulusKind::WeightedDt, k, p, ts[0])
        .with_weight(w)
        .sweep(f, ts)
}

/// `‖·‖` at `1/n` for increasing `ns`, via an increasing sweep.
pub(crate) fn at_reciprocals(
    ns: &[usize],
    sweep: impl FnOnce(&[f64]) -> Result<Vec<f64>>,
) -> Result<Vec<f64>> {
    let ts: Vec<f64> = ns.iter().rev().map(|&n| 1.0 / n as f64).collect();
    let mut v = sweep(&ts)?;
    v.reverse();
    Ok(v)
}

pub(crate) fn en_values(
    f: &RealFunction,
    ns: &[usize],
    p: LpExponent,
    w: JacobiWeight,
) -> Result<Vec<f64>> {
    Ok(en_approximants_at(f, ns, p, w)?
        .into_iter()
        .map(|a| a.err)
        .collect())
}

/// Log-log slope over the points with `y` above `floor`.
pub(crate) fn slope_above(xs: &[f64], ys: &[f64], floor: f64) -> Option<f64> {
    let (x, y): (Vec<f64>, Vec<f64>) = xs
        .iter()
        .zip(ys)
        .filter(|(_, &y)| y > floor && y.is_finite())
        .map(|(&x, &y)| (x, y))
        .unzip();
    fit_loglog_slope(&x, &y).ok().map(|f| f.slope)
}

/// `I_i = ∫_{u_i}^{u_last} v(u)^q u^e du` with `v` interpolated log-linearly
/// between the nodes and the interpolant integrated exactly.
pub(crate) fn loglinear_tail_integrals(us: &[f64], vals: &[f64], q: f64, e: f64) -> Vec<f64> {
    let n = us.len();
    let mut out = vec![0.0; n];
    for j in (0..n.saturating_sub(1)).rev() {
        let (u0, u1, v0, v1) = (us[j], us[j + 1], vals[j], vals[j + 1]);
        let seg = if v0 > 0.0 && v1 > 0.0 {
            let lr = (u1 / u0).ln();
            let sigma = (v1 / v0).ln() / lr;
            let g = q * sigma + e + 1.0;
            let base = v0.powf(q) * u0.powf(e + 1.0);
            if (g * lr).abs() < 1e-12 {
                base * lr
            } else {
                base * ((g * lr).exp() - 1.0) / g
            }
        } else {
            0.5 * (v0.max(0.0).powf(q) * u0.powf(e) + v1.max(0.0).powf(q) * u1.powf(e)) * (u1 - u0)
        };
        out[j] = out[j + 1] + seg;
    }
    out
}

/// Increasing geometric nodes from `lo` to `hi` with `per_octave` points per
/// octave, containing every point of `must` in that range.
pub(crate) fn geometric_nodes(lo: f64, hi: f64, per_octave: u32, must: &[f64]) -> Vec<f64> {
    let d = per_octave.max(1) as f64;
    let must: Vec<f64> = must.iter().copied().filter(|&u| u >= lo && u <= hi).collect();
    let near_must = |u: f64| must.iter().any(|&m| (u - m).abs() <= 1e-9 * m);
    let mut out = must.clone();
    let mut j = 0;
    loop {
        let u = lo * 2f64.powf(j as f64 / d);
        if u >= hi * (1.0 - 1e-9) {
            break;
        }
        if !near_must(u) {
            out.push(u);
        }
        j += 1;
    }
    if !near_must(hi) {
        out.push(hi);
    }
    if !near_must(lo) {
        out.push(lo);
    }
    out.sort_by(f64::total_cmp);
    out.dedup();
    out
}
