use crate::corpus::FunctionSpec;
use crate::error::Result;

use super::params::{CheckId, CheckParams};
use super::report::{CheckOutcome, HarnessConfig, ReportBuilder, ScaleAxis};
use super::support::{at_reciprocals, deriv, en_values, slope_above, weighted_sweep, zero_floor};

/// Ratios within this factor of the late median count as stabilized.
const STABLE_FACTOR: f64 = 2.0;

fn base(
    id: CheckId,
    variant: &str,
    f: &FunctionSpec,
    axis: ScaleAxis,
    q: &CheckParams,
    cfg: &HarnessConfig,
) -> ReportBuilder {
    ReportBuilder::new(id, variant, &f.id, axis)
        .zero_floor(zero_floor(f, cfg))
        .meta("k", q.k)
        .meta("r", q.r)
        .meta("p", q.p.to_string())
        .meta("weight_alpha", q.weight.alpha)
        .meta("weight_beta", q.weight.beta)
}

/// `ω^φ_k(f, t)_{w,p} ≤ c t^r ω^φ_{k-r}(f^{(r)}, t)_{wφ^r,p}`.
pub fn check_weighted_transfer(
    f: &FunctionSpec,
    q: &CheckParams,
    cfg: &HarnessConfig,
) -> Result<CheckOutcome> {
    let (k, r, p, w) = (q.k, q.r, q.p, q.weight);
    let ts = q.ts()?;
    let wr = w.times_phi_pow(r);
    let lhs = weighted_sweep(&f.function(), k, w, p, &ts)?;
    let lower = weighted_sweep(&deriv(f, r)?, k - r, wr, p, &ts)?;
    let rhs: Vec<f64> = ts
        .iter()
        .zip(&lower)
        .map(|(t, v)| t.powi(r as i32) * v)
        .collect();
    let report = base(CheckId::WeightedTransfer, "main", f, ScaleAxis::T, q, cfg)
        .rows(&ts, &lhs, &rhs)
        .meta("rhs_weight_alpha", wr.alpha)
        .meta("rhs_weight_beta", wr.beta)
        .finish(cfg);
    Ok(CheckOutcome::new(CheckId::WeightedTransfer, &f.id, vec![report]))
}

/// First index from which every finite ratio stays within [`STABLE_FACTOR`]
/// of the median of the last half. Degenerate rows neither start nor end
/// the stable tail.
fn stabilization_index(ratios: &[f64]) -> usize {
    let finite: Vec<f64> = ratios.iter().copied().filter(|v| v.is_finite() && *v > 0.0).collect();
    if finite.len() < 2 {
        return 0;
    }
    let mut late = finite[finite.len() / 2..].to_vec();
    late.sort_by(f64::total_cmp);
    let med = late[late.len() / 2];
    let inside = |v: f64| v >= med / STABLE_FACTOR && v <= med * STABLE_FACTOR;
    let mut i0 = ratios.len();
    for i in (0..ratios.len()).rev() {
        let v = ratios[i];
        if !(v.is_finite() && v > 0.0) {
            continue;
        }
        if !inside(v) {
            break;
        }
        i0 = i;
    }
    i0
}

/// `E_n(f)_{w,p} ≤ c n^{-r} ω^φ_{k-r}(f^{(r)}, 1/n)_{wφ^r,p}` for `n ≥ n₀`, and
/// the `r = 0` case `E_n(f)_{w,p} ≤ c ω^φ_k(f, 1/n)_{w,p}`.
pub fn check_weighted_jackson(
    f: &FunctionSpec,
    q: &CheckParams,
    cfg: &HarnessConfig,
) -> Result<CheckOutcome> {
    let (k, r, p, w) = (q.k, q.r, q.p, q.weight);
    let ns = q.ns()?;
    let en = en_values(&f.function(), &ns, p, w)?;
    let floor = zero_floor(f, cfg);

    let mut sides: Vec<(&str, usize, Vec<f64>)> = Vec::new();
    if r > 0 {
        let wr = w.times_phi_pow(r);
        let fr = deriv(f, r)?;
        let om = at_reciprocals(&ns, |ts| weighted_sweep(&fr, k - r, wr, p, ts))?;
        let rhs = ns
            .iter()
            .zip(&om)
            .map(|(&n, v)| (n as f64).powi(-(r as i32)) * v)
            .collect();
        sides.push(("main", r, rhs));
    }
    let om = at_reciprocals(&ns, |ts| weighted_sweep(&f.function(), k, w, p, ts))?;
    sides.push(("luther", 0, om));

    let reports = sides
        .into_iter()
        .map(|(variant, rr, rhs)| {
            let ratios: Vec<f64> = en
                .iter()
                .zip(&rhs)
                .map(|(&e, &v)| if e > floor && v > floor { e / v } else { f64::NAN })
                .collect();
            let i0 = stabilization_index(&ratios);
            let keep = i0.min(ns.len());
            let n0 = ns.get(keep).copied().unwrap_or(ns[ns.len() - 1]);
            let scales: Vec<f64> = ns[keep..].iter().map(|&n| n as f64).collect();
            base(CheckId::WeightedJackson, variant, f, ScaleAxis::N, q, cfg)
                .rows(&scales, &en[keep..], &rhs[keep..])
                .meta("n0", n0)
                .meta("rows_before_n0", keep)
                .meta("derivatives", rr)
                .finish(cfg)
        })
        .collect();
    Ok(CheckOutcome::new(CheckId::WeightedJackson, &f.id, reports))
}

/// Under `E_n(f)_{w,p} ≤ n^{-α}` for `n ≥ N` (after normalizing `f`),
/// `ω^φ_{k-r}(f^{(r)}, t)_{wφ^r,p} ≤ c t^{α-r} + c t^{k-r} E_k(f)_{w,p}`.
pub fn check_weighted_inverse(
    f: &FunctionSpec,
    q: &CheckParams,
    cfg: &HarnessConfig,
) -> Result<CheckOutcome> {
    let (k, r, p, w) = (q.k, q.r, q.p, q.weight);
    let alpha = q.alpha_value()?;
    let big_n = q.big_n.unwrap_or(1);
    let ns: Vec<usize> = q.ns()?.into_iter().filter(|&n| n >= big_n).collect();
    let ts = q.ts()?;
    let floor = zero_floor(f, cfg);
    let mut all_ns = ns.clone();
    if !all_ns.contains(&k) {
        all_ns.push(k);
        all_ns.sort_unstable();
    }
    let en_all = en_values(&f.function(), &all_ns, p, w)?;
    let e_k = en_all[all_ns.iter().position(|&n| n == k).expect("k included")];
    let en: Vec<f64> = all_ns
        .iter()
        .zip(&en_all)
        .filter(|(n, _)| ns.contains(n))
        .map(|(_, &e)| e)
        .collect();
    let nf: Vec<f64> = ns.iter().map(|&n| n as f64).collect();
    let scale = nf
        .iter()
        .zip(&en)
        .map(|(n, e)| n.powf(alpha) * e)
        .fold(0.0, f64::max);
    let e_slope = slope_above(&nf, &en, floor);
    let achievable = scale > floor && e_slope.is_some_and(|s| s <= -alpha + cfg.slope_slack);
    let lam = if scale > 0.0 { scale } else { 1.0 };

    let wr = w.times_phi_pow(r);
    let lhs: Vec<f64> = weighted_sweep(&deriv(f, r)?, k - r, wr, p, &ts)?
        .into_iter()
        .map(|v| v / lam)
        .collect();
    let top = weighted_sweep(&f.function(), k, w, p, &ts)?;
    let top_slope = slope_above(&ts, &top, floor);
    let model: Vec<f64> = ts.iter().map(|t| t.powf(alpha - r as f64)).collect();
    let rhs: Vec<f64> = ts
        .iter()
        .zip(&model)
        .map(|(t, m)| m + t.powi((k - r) as i32) * e_k / lam)
        .collect();
    let meta = |b: ReportBuilder| {
        b.meta("alpha", alpha)
            .meta("N", big_n)
            .meta("normalization", lam)
            .meta("en_slope", e_slope.unwrap_or(f64::NAN))
    };
    let hyp_note = "E_n decays slower than n^{-alpha}";
    let mut reports = vec![meta(base(CheckId::WeightedInverse, "main", f, ScaleAxis::T, q, cfg))
        .rows(&ts, &lhs, &rhs)
        .hypothesis(achievable, hyp_note)
        .finish(cfg)];
    if big_n <= k {
        reports.push(
            meta(base(CheckId::WeightedInverse, "simplified", f, ScaleAxis::T, q, cfg))
                .rows(&ts, &lhs, &model)
                .hypothesis(achievable, hyp_note)
                .finish(cfg),
        );
    }
    reports.push(
        meta(base(CheckId::WeightedInverse, "modulus_hypothesis", f, ScaleAxis::T, q, cfg))
            .rows(&ts, &lhs, &model)
            .meta("top_modulus_slope", top_slope.unwrap_or(f64::NAN))
            .hypothesis(
                top_slope.is_some_and(|s| s >= alpha - cfg.forward_margin),
                "slope of the order k weighted modulus below alpha - margin",
            )
            .finish(cfg),
    );
    Ok(CheckOutcome::new(CheckId::WeightedInverse, &f.id, reports))
}
