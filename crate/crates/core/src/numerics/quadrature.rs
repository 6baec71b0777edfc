//! Weighted `L_p` norms on subintervals of `[-1, 1]`.
//!
//! Finite `p` uses composite 32-point Gauss–Legendre panels in the variable
//! `x = c + d cos θ`, which clusters nodes at both ends of the interval, with
//! global adaptive bisection of the panel whose two-level estimate disagrees
//! most. `p = ∞` samples equispaced in `arccos x` and polishes the largest
//! local maxima by golden-section search.

use std::cmp::Ordering;
use std::collections::BinaryHeap;
use std::f64::consts::PI;
use std::sync::OnceLock;

use super::search::golden_max;
use super::weight::LpExponent;
use crate::error::{Error, Result};

const GL_POINTS: usize = 32;
/// Relative agreement required between the one-panel and two-half estimates.
pub const PANEL_RTOL: f64 = 1e-10;
/// Values that are not finite are dropped within this radius of an exclusion point.
pub const EXCLUSION_RADIUS: f64 = 1e-12;
/// Samples on the full interval for `p = ∞`.
pub const SUP_SAMPLES: usize = 4097;
/// Minimum number of samples on any subinterval for `p = ∞`.
pub const SUP_MIN_SAMPLES: usize = 65;
const SUP_REFINED_MAXIMA: usize = 5;
const SUP_GOLDEN_ITERS: usize = 40;
const MAX_PANELS: usize = 6000;
const MIN_PANEL_WIDTH: f64 = 1e-13;
const MIN_PANEL_X_EXTENT: f64 = 1e-15;

static ONE_FN: fn(f64) -> f64 = |_| 1.0;

/// Gauss–Legendre nodes and weights on `[-1, 1]`.
pub fn gauss_legendre(n: usize) -> (Vec<f64>, Vec<f64>) {
    let mut nodes = vec![0.0; n];
    let mut weights = vec![0.0; n];
    let m = n.div_ceil(2);
    for i in 0..m {
        let mut z = (PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
        let mut dp = 0.0;
        for _ in 0..100 {
            let (mut p0, mut p1) = (1.0, z);
            for j in 2..=n {
                let p2 = ((2 * j - 1) as f64 * z * p1 - (j - 1) as f64 * p0) / j as f64;
                p0 = p1;
                p1 = p2;
            }
            let pn = if n == 0 { 1.0 } else { p1 };
            let pnm1 = if n == 1 { 1.0 } else { p0 };
            dp = n as f64 * (z * pn - pnm1) / (z * z - 1.0);
            let dz = pn / dp;
            z -= dz;
            if dz.abs() < 1e-16 {
                break;
            }
        }
        nodes[i] = -z;
        nodes[n - 1 - i] = z;
        let w = 2.0 / ((1.0 - z * z) * dp * dp);
        weights[i] = w;
        weights[n - 1 - i] = w;
    }
    (nodes, weights)
}

fn gl32() -> &'static (Vec<f64>, Vec<f64>) {
    static RULE: OnceLock<(Vec<f64>, Vec<f64>)> = OnceLock::new();
    RULE.get_or_init(|| gauss_legendre(GL_POINTS))
}

/// One weighted-norm evaluation.
pub struct NormQuery<'a> {
    integrand: &'a (dyn Fn(f64) -> f64 + Sync),
    weight: &'a (dyn Fn(f64) -> f64 + Sync),
    pub p: LpExponent,
    pub a: f64,
    pub b: f64,
    breakpoints: &'a [f64],
    abs_floor: f64,
}

impl<'a> NormQuery<'a> {
    /// `‖integrand‖_p` on `[-1, 1]` with unit weight.
    pub fn new(integrand: &'a (dyn Fn(f64) -> f64 + Sync), p: LpExponent) -> Self {
        Self {
            integrand,
            weight: &ONE_FN,
            p,
            a: -1.0,
            b: 1.0,
            breakpoints: &[],
            abs_floor: 0.0,
        }
    }

    pub fn on(mut self, a: f64, b: f64) -> Self {
        self.a = a;
        self.b = b;
        self
    }

    pub fn weight(mut self, w: &'a (dyn Fn(f64) -> f64 + Sync)) -> Self {
        self.weight = w;
        self
    }

    /// Points where the integrand may be nonsmooth or unbounded.
    pub fn breakpoints(mut self, pts: &'a [f64]) -> Self {
        self.breakpoints = pts;
        self
    }

    /// Norm values below this level are not resolved further.
    pub fn abs_floor(mut self, floor: f64) -> Self {
        self.abs_floor = floor.max(0.0);
        self
    }

    fn validate(&self) -> Result<()> {
        let ok = -1.0 <= self.a && self.a <= self.b && self.b <= 1.0;
        if ok {
            Ok(())
        } else {
            Err(Error::InvalidArgument(format!(
                "norm interval [{}, {}] not inside [-1, 1]",
                self.a, self.b
            )))
        }
    }

    fn is_excluded(&self, x: f64) -> bool {
        let near = |s: f64| (x - s).abs() <= EXCLUSION_RADIUS;
        near(-1.0)
            || near(1.0)
            || near(self.a)
            || near(self.b)
            || self.breakpoints.iter().any(|&s| near(s))
    }

    /// `|integrand · weight|` at `x`; the integrand is not evaluated where the
    /// weight vanishes.
    fn abs_value(&self, x: f64) -> Result<f64> {
        let w = (self.weight)(x);
        if w == 0.0 {
            return Ok(0.0);
        }
        let v = ((self.integrand)(x) * w).abs();
        if v.is_finite() {
            Ok(v)
        } else if self.is_excluded(x) {
            Ok(0.0)
        } else {
            Err(Error::NormDivergent)
        }
    }
}

/// `(∫_a^b |integrand · weight|^p dx)^{1/p}`, or the maximum for `p = ∞`.
pub fn weighted_lp_norm(q: &NormQuery<'_>) -> Result<f64> {
    q.validate()?;
    if q.a == q.b {
        return Ok(0.0);
    }
    if q.p.is_infinite() {
        return sup_norm(q);
    }
    let p = q.p.value();
    let len = q.b - q.a;
    let atol = q.abs_floor.powf(p) * len;
    let g = |x: f64| -> Result<f64> {
        let v = q.abs_value(x)?;
        Ok(if p == 1.0 {
            v
        } else if p == 2.0 {
            v * v
        } else {
            v.powf(p)
        })
    };
    // Pointwise noise of size `floor` in the integrand moves the integral of
    // |g|^p by about p·floor·I^{(p-1)/p}·len^{1/p}.
    let floor = q.abs_floor;
    let tol = |total: f64| -> f64 {
        let total = total.abs();
        let noise = p * floor * total.powf((p - 1.0) / p) * len.powf(1.0 / p);
        (PANEL_RTOL * total).max(atol).max(noise)
    };
    let res = adaptive_theta_with(q.a, q.b, q.breakpoints, &g, &tol)?;
    if res.stuck_err > 1e-6 * res.value.abs() + tol(res.value) {
        return Err(Error::NormDivergent);
    }
    Ok(res.value.max(0.0).powf(1.0 / p))
}

fn sup_norm(q: &NormQuery<'_>) -> Result<f64> {
    let (ta, tb) = (q.b.clamp(-1.0, 1.0).acos(), q.a.clamp(-1.0, 1.0).acos());
    let span = tb - ta;
    let count = ((SUP_SAMPLES - 1) as f64 * span / PI).ceil() as usize + 1;
    let count = count.max(SUP_MIN_SAMPLES);
    let mut samples: Vec<(f64, f64)> = Vec::with_capacity(count + q.breakpoints.len());
    for j in 0..count {
        let theta = ta + span * j as f64 / (count - 1) as f64;
        let x = if j == 0 {
            q.b
        } else if j == count - 1 {
            q.a
        } else {
            theta.cos()
        };
        samples.push((theta, q.abs_value(x)?));
    }
    for &bp in q.breakpoints {
        if q.a < bp && bp < q.b {
            samples.push((bp.acos(), q.abs_value(bp)?));
        }
    }
    samples.sort_by(|l, r| l.0.total_cmp(&r.0));

    let mut best = samples.iter().fold(0.0_f64, |m, s| m.max(s.1));
    let mut peaks: Vec<usize> = (0..samples.len())
        .filter(|&i| {
            let v = samples[i].1;
            let left = i == 0 || samples[i - 1].1 <= v;
            let right = i + 1 == samples.len() || samples[i + 1].1 <= v;
            v > 0.0 && left && right
        })
        .collect();
    peaks.sort_by(|&i, &j| samples[j].1.total_cmp(&samples[i].1).then(i.cmp(&j)));
    peaks.truncate(SUP_REFINED_MAXIMA);
    for i in peaks {
        let lo = samples[i.saturating_sub(1)].0;
        let hi = samples[(i + 1).min(samples.len() - 1)].0;
        if hi <= lo {
            continue;
        }
        let mut failure = None;
        let (_, v) = golden_max(
            |theta| match q.abs_value(theta.cos().clamp(q.a, q.b)) {
                Ok(v) => v,
                Err(e) => {
                    failure = Some(e);
                    0.0
                }
            },
            lo,
            hi,
            SUP_GOLDEN_ITERS,
        );
        if let Some(e) = failure {
            return Err(e);
        }
        best = best.max(v);
    }
    Ok(best)
}

/// Outcome of an adaptive integration in the cosine variable.
#[derive(Debug, Clone)]
pub struct ThetaIntegral {
    pub value: f64,
    /// Error mass left in panels that could not be split any further.
    pub stuck_err: f64,
    /// Final panels as `(θ0, θ1)` in the map `x = c + d cos θ`.
    pub panels: Vec<(f64, f64)>,
    pub center: f64,
    pub half_width: f64,
}

struct Panel {
    t0: f64,
    t1: f64,
    left: f64,
    right: f64,
    err: f64,
    live: bool,
}

#[derive(PartialEq)]
struct HeapEntry {
    err: f64,
    idx: usize,
}

impl Eq for HeapEntry {}

impl PartialOrd for HeapEntry {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for HeapEntry {
    fn cmp(&self, other: &Self) -> Ordering {
        self.err
            .total_cmp(&other.err)
            .then_with(|| other.idx.cmp(&self.idx))
    }
}

fn gl_panel(
    t0: f64,
    t1: f64,
    c: f64,
    d: f64,
    g: &dyn Fn(f64) -> Result<f64>,
) -> Result<f64> {
    let (nodes, weights) = gl32();
    let mid = 0.5 * (t0 + t1);
    let half = 0.5 * (t1 - t0);
    let mut acc = 0.0;
    for (z, w) in nodes.iter().zip(weights) {
        let theta = mid + half * z;
        let jac = d * theta.sin();
        if jac == 0.0 {
            continue;
        }
        acc += w * g(c + d * theta.cos())? * jac;
    }
    Ok(acc * half)
}

/// Adaptive integral of `g` over `[a, b]` in the variable `x = c + d cos θ`,
/// with panel boundaries forced at `breaks`.
pub fn adaptive_theta(
    a: f64,
    b: f64,
    breaks: &[f64],
    g: &dyn Fn(f64) -> Result<f64>,
    rtol: f64,
    atol: f64,
) -> Result<ThetaIntegral> {
    adaptive_theta_with(a, b, breaks, g, &|total: f64| (rtol * total.abs()).max(atol))
}

/// As [`adaptive_theta`], with the stopping tolerance given as a function of
/// the current estimate.
pub fn adaptive_theta_with(
    a: f64,
    b: f64,
    breaks: &[f64],
    g: &dyn Fn(f64) -> Result<f64>,
    tol: &dyn Fn(f64) -> f64,
) -> Result<ThetaIntegral> {
    let c = 0.5 * (a + b);
    let d = 0.5 * (b - a);
    let mut cuts = vec![0.0, PI];
    for &x in breaks {
        if a < x && x < b {
            cuts.push(((x - c) / d).clamp(-1.0, 1.0).acos());
        }
    }
    cuts.sort_by(f64::total_cmp);
    cuts.dedup_by(|u, v| (*u - *v).abs() < 1e-15);

    let mut panels: Vec<Panel> = Vec::new();
    let make = |t0: f64, t1: f64, coarse: Option<f64>| -> Result<Panel> {
        let coarse = match coarse {
            Some(v) => v,
            None => gl_panel(t0, t1, c, d, g)?,
        };
        let m = 0.5 * (t0 + t1);
        let left = gl_panel(t0, m, c, d, g)?;
        let right = gl_panel(m, t1, c, d, g)?;
        Ok(Panel {
            t0,
            t1,
            left,
            right,
            err: (coarse - (left + right)).abs(),
            live: true,
        })
    };
    for w in cuts.windows(2) {
        if w[1] - w[0] <= 0.0 {
            continue;
        }
        let m = 0.5 * (w[0] + w[1]);
        panels.push(make(w[0], m, None)?);
        panels.push(make(m, w[1], None)?);
    }

    let mut heap: BinaryHeap<HeapEntry> = panels
        .iter()
        .enumerate()
        .map(|(idx, p)| HeapEntry { err: p.err, idx })
        .collect();
    let mut total: f64 = panels.iter().map(|p| p.left + p.right).sum();
    let mut total_err: f64 = panels.iter().map(|p| p.err).sum();
    let mut stuck_err = 0.0;
    let mut live = panels.len();
    let mut steps = 0usize;

    while total_err > tol(total) && live < MAX_PANELS {
        let Some(HeapEntry { idx, .. }) = heap.pop() else {
            break;
        };
        let (t0, t1, left, right, err) = {
            let p = &panels[idx];
            (p.t0, p.t1, p.left, p.right, p.err)
        };
        let x_extent = d * (t0.cos() - t1.cos()).abs();
        if t1 - t0 < MIN_PANEL_WIDTH || x_extent < MIN_PANEL_X_EXTENT {
            stuck_err += err;
            total_err -= err;
            continue;
        }
        panels[idx].live = false;
        let m = 0.5 * (t0 + t1);
        let pl = make(t0, m, Some(left))?;
        let pr = make(m, t1, Some(right))?;
        total += pl.left + pl.right + pr.left + pr.right - (left + right);
        total_err += pl.err + pr.err - err;
        for child in [pl, pr] {
            heap.push(HeapEntry {
                err: child.err,
                idx: panels.len(),
            });
            panels.push(child);
        }
        live += 1;
        steps += 1;
        if steps % 64 == 0 {
            let live_panels = panels.iter().filter(|p| p.live);
            total = live_panels.clone().map(|p| p.left + p.right).sum();
            total_err = live_panels.map(|p| p.err).sum::<f64>() - stuck_err;
        }
    }

    let mut finals: Vec<&Panel> = panels.iter().filter(|p| p.live).collect();
    finals.sort_by(|l, r| l.t0.total_cmp(&r.t0));
    let value = finals.iter().map(|p| p.left + p.right).sum();
    Ok(ThetaIntegral {
        value,
        stuck_err,
        panels: finals.iter().map(|p| (p.t0, p.t1)).collect(),
        center: c,
        half_width: d,
    })
}

/// A discrete rule `∑ λ_j g(x_j) ≈ ∫_a^b g`, exposed for discretized
/// optimization problems.
#[derive(Debug, Clone)]
pub struct QuadratureRule {
    pub nodes: Vec<f64>,
    pub weights: Vec<f64>,
}

impl QuadratureRule {
    pub fn integrate(&self, g: impl Fn(f64) -> f64) -> f64 {
        self.nodes
            .iter()
            .zip(&self.weights)
            .map(|(&x, &w)| w * g(x))
            .sum()
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }
}

/// Builds a rule from the final panels of an adaptive integration of
/// `shape`, so that the rule resolves the features of `shape`.
pub fn adapted_rule(
    a: f64,
    b: f64,
    breaks: &[f64],
    shape: &dyn Fn(f64) -> f64,
    rtol: f64,
) -> Result<QuadratureRule> {
    let g = |x: f64| -> Result<f64> {
        let v = shape(x);
        Ok(if v.is_finite() { v.abs() } else { 0.0 })
    };
    let res = adaptive_theta(a, b, breaks, &g, rtol, 0.0)?;
    let (nodes, weights) = gl32();
    let mut rule = QuadratureRule {
        nodes: Vec::with_capacity(res.panels.len() * GL_POINTS),
        weights: Vec::with_capacity(res.panels.len() * GL_POINTS),
    };
    for &(t0, t1) in &res.panels {
        let mid = 0.5 * (t0 + t1);
        let half = 0.5 * (t1 - t0);
        for (z, w) in nodes.iter().zip(weights) {
            let theta = mid + half * z;
            let jac = res.half_width * theta.sin();
            if jac == 0.0 {
                continue;
            }
            rule.nodes.push(res.center + res.half_width * theta.cos());
            rule.weights.push(w * half * jac);
        }
    }
    Ok(rule)
}
