//! Moduli of smoothness: the moving-weight modulus `ω^φ_{k,r}`, the
//! Ditzian–Totik modulus, its weighted three-term version and the main-part
//! modulus `Ω^φ_k`.
//!
//! Each modulus is a supremum over steps `0 < h ≤ t`. It is evaluated on the
//! geometric grid `t·2^{-6} … t` with eight points per octave, followed by a
//! golden-section search between the neighbours of the best grid step.

use std::fmt;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::differences::{
    backward_diff, forward_diff, restricted_symmetric_diff, DiffQuery, MAX_ORDER,
};
use crate::error::{Error, Result};
use crate::function::{phi, RealFunction};
use crate::numerics::{golden_max, weighted_lp_norm, GeometricGrid, JacobiWeight, LpExponent, NormQuery};

/// Octaves covered by the step grid below `t`.
pub const H_GRID_OCTAVES: i32 = 6;
const H_REFINE_ITERS: usize = 16;
// Norm values below this multiple of the function scale are not resolved.
const FLOOR_REL: f64 = 1e-14;

/// `W_δ(x) = sqrt((1 - x - δφ(x)/2)(1 + x - δφ(x)/2))`, or 0 when either
/// factor is negative.
#[inline]
pub fn moving_weight(x: f64, delta: f64) -> f64 {
    let half = 0.5 * delta * phi(x);
    let a = 1.0 - x - half;
    let b = 1.0 + x - half;
    if a < 0.0 || b < 0.0 {
        0.0
    } else {
        (a * b).sqrt()
    }
}

/// `W_{kh}(x)` from the outer nodes `x ∓ khφ(x)/2` of the difference, as
/// `((1 - last)(1 + first))^{1/2}`. Equal to [`moving_weight`] in exact
/// arithmetic. Rounded the same way as the nodes, so the product with an `f`
/// that blows up at an endpoint stays bounded as a node reaches it.
fn node_weight(q: DiffQuery) -> f64 {
    let half = 0.5 * q.k as f64;
    let first = q.x + (0.0 - half) * q.h;
    let last = q.x + (q.k as f64 - half) * q.h;
    let a = 1.0 - last;
    let b = 1.0 + first;
    if a < 0.0 || b < 0.0 {
        0.0
    } else {
        (a * b).sqrt()
    }
}

/// `A` such that, for `|x| < 1`, `x ± khφ(x)/2 ∈ [-1, 1]` exactly when
/// `|x| ≤ A`; `None` when no such `x` qualifies. At `x = ±1` the nodes
/// collapse onto the endpoint and every difference there vanishes.
pub fn support_half_width(k: usize, h: f64) -> Option<f64> {
    let s = 0.25 * (k as f64 * h).powi(2);
    if s > 1.0 {
        None
    } else {
        Some((1.0 - s) / (1.0 + s))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ModulusKind {
    New,
    Dt,
    WeightedDt,
    MainPart,
}

impl fmt::Display for ModulusKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Self::New => "new",
            Self::Dt => "dt",
            Self::WeightedDt => "weighted_dt",
            Self::MainPart => "main_part",
        })
    }
}

impl std::str::FromStr for ModulusKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "new" => Ok(Self::New),
            "dt" => Ok(Self::Dt),
            "weighted_dt" | "weighted-dt" => Ok(Self::WeightedDt),
            "main_part" | "main-part" => Ok(Self::MainPart),
            other => Err(Error::InvalidArgument(format!("unknown modulus kind {other:?}"))),
        }
    }
}

/// One modulus evaluation. `r` is used by [`ModulusKind::New`] only and `w`
/// by the weighted kinds only.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ModulusQuery {
    pub kind: ModulusKind,
    pub k: usize,
    #[serde(default)]
    pub r: usize,
    pub p: LpExponent,
    #[serde(default)]
    pub w: JacobiWeight,
    pub t: f64,
}

impl ModulusQuery {
    pub fn new(kind: ModulusKind, k: usize, p: LpExponent, t: f64) -> Self {
        Self {
            kind,
            k,
            r: 0,
            p,
            w: JacobiWeight::UNIT,
            t,
        }
    }

    pub fn with_r(mut self, r: usize) -> Self {
        self.r = r;
        self
    }

    pub fn with_weight(mut self, w: JacobiWeight) -> Self {
        self.w = w;
        self
    }

    pub fn at(mut self, t: f64) -> Self {
        self.t = t;
        self
    }

    /// Steps sampled for the supremum over `h`.
    pub fn h_grid(&self) -> Result<GeometricGrid> {
        step_grid(self.t)
    }

    pub fn validate(&self) -> Result<()> {
        if self.k == 0 || self.k > MAX_ORDER {
            return Err(Error::DifferenceOrder(self.k));
        }
        if !(self.t > 0.0) || !self.t.is_finite() {
            return Err(Error::InvalidArgument(format!("t must be positive, got {}", self.t)));
        }
        let max = 2.0 / self.k as f64;
        if self.t > max {
            return Err(Error::TOutOfRange { t: self.t, max });
        }
        if matches!(self.kind, ModulusKind::WeightedDt | ModulusKind::MainPart) {
            let e = endpoint_length(self.k, self.t);
            if e >= 1.0 {
                return Err(Error::EndpointIntervalsOverlap(e));
            }
        }
        Ok(())
    }

    /// Evaluates the modulus of `f`. For [`ModulusKind::New`], `f` is the
    /// derivative `f^{(r)}`.
    pub fn eval(&self, f: &RealFunction) -> Result<f64> {
        self.validate()?;
        match self.kind {
            ModulusKind::New => sup_moving(f, self.k, self.r, self.t, self.p),
            ModulusKind::Dt => sup_moving(f, self.k, 0, self.t, self.p),
            ModulusKind::WeightedDt => weighted_three_term(f, self.k, self.t, self.w, self.p, true),
            ModulusKind::MainPart => weighted_three_term(f, self.k, self.t, self.w, self.p, false),
        }
    }

    /// Values at each `t` of an increasing sequence, as running maxima: since
    /// the step sets are nested, every computed value is a lower bound for
    /// the modulus at all larger `t`.
    pub fn sweep(&self, f: &RealFunction, ts: &[f64]) -> Result<Vec<f64>> {
        let mut out = Vec::with_capacity(ts.len());
        let mut best = 0.0_f64;
        let mut prev = f64::NEG_INFINITY;
        for &t in ts {
            if t <= prev {
                return Err(Error::InvalidArgument("sweep needs increasing t".into()));
            }
            prev = t;
            best = best.max(self.at(t).eval(f)?);
            out.push(best);
        }
        Ok(out)
    }
}

fn step_grid(t: f64) -> Result<GeometricGrid> {
    GeometricGrid::with_default_ratio(t * 2f64.powi(-H_GRID_OCTAVES), t)
}

/// `2k²t²`, the length of each endpoint interval.
fn endpoint_length(k: usize, t: f64) -> f64 {
    2.0 * (k * k) as f64 * t * t
}

/// `ω^φ_{k,r}(f^{(r)}, t)_p` given `fr = f^{(r)}`.
pub fn new_modulus(fr: &RealFunction, k: usize, r: usize, t: f64, p: LpExponent) -> Result<f64> {
    ModulusQuery::new(ModulusKind::New, k, p, t).with_r(r).eval(fr)
}

/// `ω^φ_k(f, t)_p`.
pub fn dt_modulus(f: &RealFunction, k: usize, t: f64, p: LpExponent) -> Result<f64> {
    ModulusQuery::new(ModulusKind::Dt, k, p, t).eval(f)
}

/// `ω^φ_k(f, t)_{w,p}`: main part plus forward and backward endpoint terms.
pub fn weighted_dt_modulus(
    f: &RealFunction,
    k: usize,
    t: f64,
    w: JacobiWeight,
    p: LpExponent,
) -> Result<f64> {
    ModulusQuery::new(ModulusKind::WeightedDt, k, p, t)
        .with_weight(w)
        .eval(f)
}

/// `Ω^φ_k(f, t)_{w,p}`, the first term of the weighted modulus.
pub fn main_part_modulus(
    f: &RealFunction,
    k: usize,
    t: f64,
    w: JacobiWeight,
    p: LpExponent,
) -> Result<f64> {
    ModulusQuery::new(ModulusKind::MainPart, k, p, t)
        .with_weight(w)
        .eval(f)
}

/// Maximum of `eval` over the grid, then a golden-section search between the
/// neighbours of the best grid point.
fn sup_over_steps(hs: &[f64], eval: &(dyn Fn(f64) -> Result<f64> + Sync)) -> Result<f64> {
    let vals = hs
        .par_iter()
        .map(|&h| eval(h))
        .collect::<Result<Vec<f64>>>()?;
    let mut idx = 0;
    for (i, &v) in vals.iter().enumerate() {
        if v > vals[idx] {
            idx = i;
        }
    }
    let best = vals[idx];
    if best == 0.0 || hs.len() < 2 {
        return Ok(best);
    }
    // hs is descending
    let hi = hs[idx.saturating_sub(1)];
    let lo = hs[(idx + 1).min(hs.len() - 1)];
    let mut failure = None;
    let (_, refined) = golden_max(
        |h| match eval(h) {
            Ok(v) => v,
            Err(e) => {
                failure.get_or_insert(e);
                0.0
            }
        },
        lo,
        hi,
        H_REFINE_ITERS,
    );
    if let Some(e) = failure {
        return Err(e);
    }
    Ok(best.max(refined))
}

/// Points `x` where `x + c h φ(x) = s` for a node offset `c`.
fn moving_hits(s: f64, c: f64, h: f64, out: &mut Vec<f64>) {
    if c == 0.0 {
        out.push(s);
        return;
    }
    let ch = c * h;
    let radius = (1.0 + ch * ch).sqrt();
    if s.abs() > radius {
        return;
    }
    let psi = ch.atan2(1.0);
    let a = (s / radius).clamp(-1.0, 1.0).acos();
    for theta in [psi + a, psi - a] {
        if (0.0..=std::f64::consts::PI).contains(&theta) {
            out.push(theta.cos());
        }
    }
}

// Hits on an interval end are where the node reaches the singular point
// exactly at the support boundary; rounding must not move them inside.
fn strictly_inside(x: f64, lo: f64, hi: f64) -> bool {
    const MARGIN: f64 = 1e-10;
    lo + MARGIN < x && x < hi - MARGIN
}

fn inside(pts: &mut Vec<f64>, lo: f64, hi: f64) {
    pts.retain(|&x| lo < x && x < hi);
    pts.sort_by(f64::total_cmp);
    pts.dedup();
}

// A singular point where f is infinite makes the sup norm divergent as soon as
// a node can land on it with a nonzero weight.
fn check_unbounded_hits(f: &RealFunction, hits_exist: bool, p: LpExponent, s: f64) -> Result<()> {
    if p.is_infinite() && hits_exist && !f.eval(s).is_finite() {
        Err(Error::NormDivergent)
    } else {
        Ok(())
    }
}

/// Shared kernel of the moving-weight and the plain DT modulus.
fn sup_moving(f: &RealFunction, k: usize, r: usize, t: f64, p: LpExponent) -> Result<f64> {
    let floor = FLOOR_REL * f.scale(JacobiWeight::UNIT);
    let hs = step_grid(t)?.points();
    let fe = f.as_fn();
    let norm_at = |h: f64| -> Result<f64> {
        let Some(a) = support_half_width(k, h) else {
            return Ok(0.0);
        };
        let mut breaks = Vec::new();
        for &s in f.singular_points() {
            let before = breaks.len();
            for i in 0..=k {
                moving_hits(s, i as f64 - 0.5 * k as f64, h, &mut breaks);
            }
            let hits_inside = breaks[before..].iter().any(|&x| strictly_inside(x, -a, a));
            check_unbounded_hits(f, hits_inside, p, s)?;
        }
        inside(&mut breaks, -a, a);
        let integrand = |x: f64| -> f64 {
            let step = h * phi(x);
            if step == 0.0 {
                return 0.0;
            }
            let q = DiffQuery::raw(x, step, k);
            let weight = if r == 0 {
                1.0
            } else {
                let wv = node_weight(q);
                if wv == 0.0 {
                    return 0.0;
                }
                wv.powi(r as i32)
            };
            weight * restricted_symmetric_diff(&fe, q)
        };
        weighted_lp_norm(
            &NormQuery::new(&integrand, p)
                .on(-a, a)
                .breakpoints(&breaks)
                .abs_floor(floor),
        )
    };
    sup_over_steps(&hs, &norm_at)
}

fn weighted_three_term(
    f: &RealFunction,
    k: usize,
    t: f64,
    w: JacobiWeight,
    p: LpExponent,
    with_endpoints: bool,
) -> Result<f64> {
    let floor = FLOOR_REL * f.scale(w);
    let wf = move |x: f64| w.eval(x);
    let fe = f.as_fn();
    let kk = (k * k) as f64;

    let main_at = |h: f64| -> Result<f64> {
        let edge = 1.0 - 2.0 * kk * h * h;
        let mut breaks = Vec::new();
        for &s in f.singular_points() {
            let before = breaks.len();
            for i in 0..=k {
                moving_hits(s, i as f64 - 0.5 * k as f64, h, &mut breaks);
            }
            let hits_inside = breaks[before..].iter().any(|&x| strictly_inside(x, -edge, edge));
            check_unbounded_hits(f, hits_inside, p, s)?;
        }
        inside(&mut breaks, -edge, edge);
        let integrand = |x: f64| -> f64 {
            let step = h * phi(x);
            if step == 0.0 {
                return 0.0;
            }
            restricted_symmetric_diff(&fe, DiffQuery::raw(x, step, k))
        };
        weighted_lp_norm(
            &NormQuery::new(&integrand, p)
                .on(-edge, edge)
                .weight(&wf)
                .breakpoints(&breaks)
                .abs_floor(floor),
        )
    };
    let main = sup_over_steps(&step_grid(t)?.points(), &main_at)?;
    if !with_endpoints {
        return Ok(main);
    }

    let len = endpoint_length(k, t);
    let end_hs = step_grid(len)?.points();
    let one_sided = |forward: bool| -> Result<f64> {
        let (lo, hi) = if forward { (-1.0, -1.0 + len) } else { (1.0 - len, 1.0) };
        let at = |h: f64| -> Result<f64> {
            let mut breaks = Vec::new();
            for &s in f.singular_points() {
                let before = breaks.len();
                for i in 0..=k {
                    let shift = i as f64 * h;
                    breaks.push(if forward { s - shift } else { s + shift });
                }
                let hits_inside = breaks[before..].iter().any(|&x| strictly_inside(x, lo, hi));
                check_unbounded_hits(f, hits_inside, p, s)?;
            }
            inside(&mut breaks, lo, hi);
            let integrand = |x: f64| -> f64 {
                let q = DiffQuery::raw(x, h, k);
                if forward {
                    forward_diff(&fe, q)
                } else {
                    backward_diff(&fe, q)
                }
            };
            weighted_lp_norm(
                &NormQuery::new(&integrand, p)
                    .on(lo, hi)
                    .weight(&wf)
                    .breakpoints(&breaks)
                    .abs_floor(floor),
            )
        };
        sup_over_steps(&end_hs, &at)
    };
    Ok(main + one_sided(true)? + one_sided(false)?)
}
