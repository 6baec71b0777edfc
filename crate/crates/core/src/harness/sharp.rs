use crate::bestapprox::best_weighted_lp;
use crate::corpus::FunctionSpec;
use crate::error::Result;
use crate::numerics::JacobiWeight;

use super::params::{CheckId, CheckParams};
use super::report::{CheckOutcome, HarnessConfig, ReportBuilder, ScaleAxis};
use super::support::{
    deriv, en_values, geometric_nodes, loglinear_tail_integrals, new_sweep, zero_floor,
};

const INTEGRAL_NODES_PER_OCTAVE: u32 = 4;

/// Smallest `j` with `2^j ≥ m`.
pub(crate) fn jackson_j0(m: usize) -> usize {
    (0..).find(|&j| 1usize << j >= m).expect("m is finite")
}

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
        .meta("m", q.k)
        .meta("r", q.r)
        .meta("p", q.p.to_string())
}

/// `ω^φ_{m,r}(f^{(r)}, t)_p ≤ C t^m (∫_t^1 ω^φ_{m+1,r}(f^{(r)}, u)_p^q u^{-mq-1} du
/// + E_m(f^{(r)})^q_{φ^r,p})^{1/q}` and its discrete form, `q = min(2, p)`.
pub fn check_sharp_marchaud(
    f: &FunctionSpec,
    q: &CheckParams,
    cfg: &HarnessConfig,
) -> Result<CheckOutcome> {
    let (m, r, p) = (q.k, q.r, q.p);
    let qq = p.marchaud_q();
    let ts = q.ts()?;
    let fr = deriv(f, r)?;
    let wr = JacobiWeight::phi_pow(r);
    let lhs = new_sweep(&fr, m, r, p, &ts)?;

    let us = geometric_nodes(ts[0], 1.0, INTEGRAL_NODES_PER_OCTAVE, &ts);
    let upper = new_sweep(&fr, m + 1, r, p, &us)?;
    let tails = loglinear_tail_integrals(&us, &upper, qq, -(m as f64) * qq - 1.0);
    let e_m = best_weighted_lp(&fr, m, p, wr)?.err;
    let rhs_int: Vec<f64> = ts
        .iter()
        .map(|&t| {
            let i = us.iter().position(|&u| u == t).expect("t is a node");
            t.powi(m as i32) * (tails[i] + e_m.powf(qq)).powf(1.0 / qq)
        })
        .collect();

    let n_top = ((1.0 / ts[0]) * (1.0 - 1e-12)).ceil() as usize - 1;
    let ns: Vec<usize> = (1..=n_top.max(1)).collect();
    let en = en_values(&fr, &ns, p, wr)?;
    let rhs_disc: Vec<f64> = ts
        .iter()
        .map(|&t| {
            let s: f64 = ns
                .iter()
                .zip(&en)
                .filter(|(&n, _)| (n as f64) < 1.0 / t * (1.0 - 1e-12))
                .map(|(&n, e)| (n as f64).powf(qq * m as f64 - 1.0) * e.powf(qq))
                .sum();
            t.powi(m as i32) * s.powf(1.0 / qq)
        })
        .collect();
    let build = |variant: &str, rhs: &[f64]| {
        base(CheckId::SharpMarchaud, variant, f, ScaleAxis::T, q, cfg)
            .rows(&ts, &lhs, rhs)
            .meta("q", qq)
            .meta("e_m", e_m)
            .finish(cfg)
    };
    let reports = vec![build("integral", &rhs_int), build("discrete", &rhs_disc)];
    Ok(CheckOutcome::new(CheckId::SharpMarchaud, &f.id, reports))
}

/// `2^{-nm} (Σ_{j=j₀}^n 2^{mjs} E_{2^j}(f^{(r)})^s_{φ^r,p})^{1/s} ≤ C ω^φ_{m,r}(f^{(r)}, 2^{-n})_p`,
/// the same with `ω^φ_{m+1,r}(f^{(r)}, 2^{-j})_p` in place of `E_{2^j}`, and the
/// integral form, `s = max(p, 2)`. Rows are indexed by the degree `2^n`.
pub fn check_sharp_jackson(
    f: &FunctionSpec,
    q: &CheckParams,
    cfg: &HarnessConfig,
) -> Result<CheckOutcome> {
    let (m, r, p) = (q.k, q.r, q.p);
    let s = p.jackson_s();
    let levels = q.n_levels.expect("validated");
    let j0 = jackson_j0(m);
    let fr = deriv(f, r)?;
    let wr = JacobiWeight::phi_pow(r);
    let degrees: Vec<usize> = (j0..=levels).map(|j| 1usize << j).collect();
    let scales: Vec<f64> = degrees.iter().map(|&d| d as f64).collect();
    let en = en_values(&fr, &degrees, p, wr)?;
    // increasing t = 2^{-n}
    let ts: Vec<f64> = scales.iter().rev().map(|d| 1.0 / d).collect();
    let rev = |mut v: Vec<f64>| {
        v.reverse();
        v
    };
    let rhs = rev(new_sweep(&fr, m, r, p, &ts)?);
    let upper = rev(new_sweep(&fr, m + 1, r, p, &ts)?);

    let dyadic = |terms: &[f64]| -> Vec<f64> {
        let mut acc = 0.0;
        (j0..=levels)
            .zip(terms)
            .map(|(j, &e)| {
                acc += 2f64.powf((m * j) as f64 * s) * e.powf(s);
                2f64.powf(-((m * j) as f64)) * acc.powf(1.0 / s)
            })
            .collect()
    };
    let lhs_e = dyadic(&en);
    let lhs_w = dyadic(&upper);

    let u_hi = 1.0 / m as f64;
    let us = geometric_nodes(ts[0], u_hi, INTEGRAL_NODES_PER_OCTAVE, &ts);
    let om_u = new_sweep(&fr, m + 1, r, p, &us)?;
    let tails = loglinear_tail_integrals(&us, &om_u, s, -(m as f64) * s - 1.0);
    let lhs_int: Vec<f64> = scales
        .iter()
        .map(|&d| {
            let t = 1.0 / d;
            match us.iter().position(|&u| u == t) {
                Some(i) => t.powi(m as i32) * tails[i].powf(1.0 / s),
                None => 0.0,
            }
        })
        .collect();
    let build = |variant: &str, lhs: &[f64]| {
        base(CheckId::SharpJackson, variant, f, ScaleAxis::N, q, cfg)
            .rows(&scales, lhs, &rhs)
            .meta("s", s)
            .meta("j0", j0)
            .meta("n_levels", levels)
            .finish(cfg)
    };
    let reports = vec![
        build("best_approximation", &lhs_e),
        build("modulus_sum", &lhs_w),
        build("integral", &lhs_int),
    ];
    Ok(CheckOutcome::new(CheckId::SharpJackson, &f.id, reports))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numerics::LpExponent;

    #[test]
    fn exponent_rules() {
        for (p, q, s) in [(1.5, 1.5, 2.0), (2.0, 2.0, 2.0), (3.0, 2.0, 3.0)] {
            let p = LpExponent::new(p).unwrap();
            assert_eq!(p.marchaud_q(), q);
            assert_eq!(p.jackson_s(), s);
        }
        assert_eq!(jackson_j0(1), 0);
        assert_eq!(jackson_j0(2), 1);
        assert_eq!(jackson_j0(3), 2);
    }
}
