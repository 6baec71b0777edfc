use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use super::report::{CheckOutcome, HarnessConfig};
use super::{checks, sharp, weighted};
use crate::corpus::FunctionSpec;
use crate::error::{Error, Result};
use crate::numerics::{weighted_lp_norm, JacobiWeight, LpExponent, NormQuery};

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CheckId {
    Direct,
    InverseSum,
    Hierarchy,
    Equivalence,
    SharpMarchaud,
    SharpJackson,
    Characterization,
    PnGrowth,
    WeightedTransfer,
    WeightedJackson,
    WeightedInverse,
}

impl CheckId {
    pub const ALL: [CheckId; 11] = [
        Self::Direct,
        Self::InverseSum,
        Self::Hierarchy,
        Self::Equivalence,
        Self::SharpMarchaud,
        Self::SharpJackson,
        Self::Characterization,
        Self::PnGrowth,
        Self::WeightedTransfer,
        Self::WeightedJackson,
        Self::WeightedInverse,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            Self::Direct => "direct",
            Self::InverseSum => "inverse_sum",
            Self::Hierarchy => "hierarchy",
            Self::Equivalence => "equivalence",
            Self::SharpMarchaud => "sharp_marchaud",
            Self::SharpJackson => "sharp_jackson",
            Self::Characterization => "characterization",
            Self::PnGrowth => "pn_growth",
            Self::WeightedTransfer => "weighted_transfer",
            Self::WeightedJackson => "weighted_jackson",
            Self::WeightedInverse => "weighted_inverse",
        }
    }
}

impl fmt::Display for CheckId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for CheckId {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Self::ALL
            .into_iter()
            .find(|c| c.as_str() == s)
            .ok_or_else(|| Error::InvalidArgument(format!("unknown check id {s:?}")))
    }
}

/// Degrees `lo, lo + step, …, ≤ hi`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct NRange {
    pub lo: usize,
    pub hi: usize,
    #[serde(default = "one")]
    pub step: usize,
}

fn one() -> usize {
    1
}

impl NRange {
    pub fn new(lo: usize, hi: usize, step: usize) -> Self {
        Self { lo, hi, step }
    }

    pub fn values(&self) -> Vec<usize> {
        (self.lo..=self.hi).step_by(self.step.max(1)).collect()
    }
}

/// Increasing geometric grid `hi·2^{-j/per_octave} ≥ lo`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TGrid {
    pub lo: f64,
    pub hi: f64,
    #[serde(default = "two")]
    pub per_octave: u32,
}

fn two() -> u32 {
    2
}

impl TGrid {
    pub fn new(lo: f64, hi: f64, per_octave: u32) -> Self {
        Self { lo, hi, per_octave }
    }

    pub fn points(&self) -> Vec<f64> {
        let d = self.per_octave.max(1) as f64;
        let mut out = Vec::new();
        let mut j = 0;
        loop {
            let t = self.hi * 2f64.powf(-(j as f64) / d);
            if t < self.lo * (1.0 - 1e-12) || j > 10_000 {
                break;
            }
            out.push(t);
            j += 1;
        }
        out.reverse();
        out
    }
}

/// Parameters of one check. `k` is the order `m` for the sharp checks.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CheckParams {
    pub k: usize,
    #[serde(default)]
    pub r: usize,
    pub p: LpExponent,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub alpha: Option<f64>,
    #[serde(default)]
    pub weight: JacobiWeight,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub n_range: Option<NRange>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub t_grid: Option<TGrid>,
    /// Largest `n` in the sums of the inverse check.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub n_max: Option<usize>,
    /// Last dyadic level of the sharp Jackson check.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub n_levels: Option<usize>,
    /// Index from which the weighted inverse hypothesis is imposed.
    #[serde(default, rename = "N", skip_serializing_if = "Option::is_none")]
    pub big_n: Option<usize>,
}

impl CheckParams {
    pub fn new(k: usize, r: usize, p: LpExponent) -> Self {
        Self {
            k,
            r,
            p,
            alpha: None,
            weight: JacobiWeight::UNIT,
            n_range: None,
            t_grid: None,
            n_max: None,
            n_levels: None,
            big_n: None,
        }
    }

    pub fn alpha(mut self, alpha: f64) -> Self {
        self.alpha = Some(alpha);
        self
    }

    pub fn weight(mut self, w: JacobiWeight) -> Self {
        self.weight = w;
        self
    }

    pub fn n_range(mut self, lo: usize, hi: usize, step: usize) -> Self {
        self.n_range = Some(NRange::new(lo, hi, step));
        self
    }

    pub fn t_grid(mut self, lo: f64, hi: f64, per_octave: u32) -> Self {
        self.t_grid = Some(TGrid::new(lo, hi, per_octave));
        self
    }

    pub fn n_max(mut self, n: usize) -> Self {
        self.n_max = Some(n);
        self
    }

    pub fn n_levels(mut self, n: usize) -> Self {
        self.n_levels = Some(n);
        self
    }

    pub fn big_n(mut self, n: usize) -> Self {
        self.big_n = Some(n);
        self
    }

    pub(crate) fn ns(&self) -> Result<Vec<usize>> {
        let ns = self
            .n_range
            .ok_or_else(|| bad("n_range is required"))?
            .values();
        if ns.len() < 2 {
            return Err(bad("n_range must contain at least two degrees"));
        }
        Ok(ns)
    }

    pub(crate) fn ts(&self) -> Result<Vec<f64>> {
        let ts = self
            .t_grid
            .ok_or_else(|| bad("t_grid is required"))?
            .points();
        if ts.len() < 2 || !(ts[0] > 0.0) {
            return Err(bad("t_grid must contain at least two positive points"));
        }
        Ok(ts)
    }

    pub(crate) fn alpha_value(&self) -> Result<f64> {
        self.alpha.ok_or_else(|| bad("alpha is required"))
    }

    fn t_max(&self) -> Result<f64> {
        Ok(*self.ts()?.last().expect("nonempty"))
    }
}

fn bad(msg: impl Into<String>) -> Error {
    Error::InvalidArgument(msg.into())
}

fn need(cond: bool, msg: impl FnOnce() -> String) -> Result<()> {
    if cond {
        Ok(())
    } else {
        Err(Error::InvalidArgument(msg()))
    }
}

fn need_member(f: &FunctionSpec, r: usize, p: LpExponent) -> Result<()> {
    need(f.b_rp_member(r, p), || format!("{} is not in B^{r}_{p}", f.id))
}

fn need_corollary_p(p: LpExponent) -> Result<()> {
    if p.value() > 1.0 && !p.is_infinite() {
        Ok(())
    } else {
        Err(Error::OutOfCorollaryRange(p.value()))
    }
}

fn need_t_at_most(q: &CheckParams, max: f64, what: &str) -> Result<()> {
    let t = q.t_max()?;
    need(t <= max * (1.0 + 1e-12), || format!("t_grid reaches {t}, but {what} needs t <= {max}"))
}

fn need_t_below(q: &CheckParams, max: f64, what: &str) -> Result<()> {
    let t = q.t_max()?;
    need(t < max, || format!("t_grid reaches {t}, but {what} needs t < {max}"))
}

/// `2k²t² < 1`, the range of the weighted moduli of order `k`.
fn weighted_t_limit(k: usize) -> f64 {
    1.0 / (k as f64 * std::f64::consts::SQRT_2)
}

fn need_alpha_between(q: &CheckParams, lo: f64, hi: f64) -> Result<f64> {
    let a = q.alpha_value()?;
    need(lo < a && a < hi, || format!("alpha = {a} must lie in ({lo}, {hi})"))?;
    Ok(a)
}

/// Rejects parameters outside the preconditions of a check.
pub fn validate_check(id: CheckId, f: &FunctionSpec, q: &CheckParams) -> Result<()> {
    let (k, r, p) = (q.k, q.r, q.p);
    need(k >= 1, || "k must be at least 1".into())?;
    need(r <= f.max_order, || {
        format!("{} has derivatives up to order {} only", f.id, f.max_order)
    })?;
    match id {
        CheckId::Direct => {
            need_member(f, r, p)?;
            let ns = q.ns()?;
            need(ns[0] >= k + r, || format!("n_range must start at k + r = {}", k + r))
        }
        CheckId::InverseSum => {
            need_member(f, r, p)?;
            let n_max = q.n_max.ok_or_else(|| bad("n_max is required"))?;
            let ts = q.ts()?;
            need(ts[0] * n_max as f64 >= 1.0 - 1e-12, || {
                format!("t_grid must stay above 1/n_max = {}", 1.0 / n_max as f64)
            })?;
            need(n_max >= 16, || "n_max must be at least 16".into())?;
            need_t_at_most(q, 2.0 / k as f64, "the modulus")
        }
        CheckId::Hierarchy => {
            need(k >= 2, || "hierarchy needs k >= 2".into())?;
            need(r < f.max_order, || format!("{} lacks derivative {}", f.id, r + 1))?;
            need_member(f, r + 1, p)?;
            need_t_at_most(q, 2.0 / (k + r) as f64, "the modulus of order k + r")
        }
        CheckId::Equivalence => {
            need_member(f, r, p)?;
            need_t_at_most(q, 2.0 / k as f64, "the equivalence range")
        }
        CheckId::SharpMarchaud => {
            need_corollary_p(p)?;
            need_member(f, r, p)?;
            need_t_at_most(q, 2.0 / k as f64, "the modulus")?;
            need_t_below(q, 1.0, "the integral over (t, 1)")
        }
        CheckId::SharpJackson => {
            need_corollary_p(p)?;
            need_member(f, r, p)?;
            let levels = q.n_levels.ok_or_else(|| bad("n_levels is required"))?;
            let j0 = sharp::jackson_j0(k);
            need(levels >= j0 + 2 && levels <= 10, || {
                format!("n_levels must lie in {}..=10", j0 + 2)
            })
        }
        CheckId::Characterization => {
            need_alpha_between(q, r as f64, (r + k) as f64)?;
            let ns = q.ns()?;
            need(ns[0] >= 1, || "n_range must start at 1 or later".into())?;
            need_t_at_most(q, 2.0 / k as f64, "the modulus")
        }
        CheckId::PnGrowth => {
            need_alpha_between(q, r as f64, (r + k) as f64)?;
            let ns = q.ns()?;
            need(ns[0] >= k + r, || format!("n_range must start at r + k = {}", k + r))?;
            need(2 * ns[0] >= k + r, || "n_range too small for the moduli".into())
        }
        CheckId::WeightedTransfer => {
            need(0 < r && r < k, || format!("weighted transfer needs 0 < r < k, got r={r}, k={k}"))?;
            need_t_below(q, weighted_t_limit(k), "the weighted modulus")?;
            need_weighted_norm(f, r, q.weight, p)
        }
        CheckId::WeightedJackson => {
            need(r < k, || format!("weighted Jackson needs r < k, got r={r}, k={k}"))?;
            let ns = q.ns()?;
            need(1.0 / (ns[0] as f64) < weighted_t_limit(k), || {
                format!("n_range must start above {}", 1.0 / weighted_t_limit(k))
            })?;
            need_weighted_norm(f, r, q.weight, p)
        }
        CheckId::WeightedInverse => {
            let a = need_alpha_between(q, r as f64, k as f64)?;
            let _ = a;
            q.ns()?;
            need(q.big_n.unwrap_or(1) >= 1, || "N must be positive".into())?;
            need_t_below(q, weighted_t_limit(k), "the weighted modulus of order k")?;
            need_weighted_norm(f, r, q.weight, p)
        }
    }
}

/// `‖w φ^r f^{(r)}‖_p < ∞`.
fn need_weighted_norm(f: &FunctionSpec, r: usize, w: JacobiWeight, p: LpExponent) -> Result<()> {
    let fr = f
        .deriv(r)
        .ok_or_else(|| bad(format!("{} lacks derivative {r}", f.id)))?;
    let wr = w.times_phi_pow(r);
    let g = |x: f64| fr.eval(x);
    let wf = |x: f64| wr.eval(x);
    let v = weighted_lp_norm(
        &NormQuery::new(&g, p)
            .weight(&wf)
            .breakpoints(fr.singular_points())
            .abs_floor(1e-14),
    );
    match v {
        Ok(v) if v.is_finite() => Ok(()),
        _ => Err(bad(format!(
            "‖w φ^{r} f^({r})‖_{p} is not finite for {} with {w}",
            f.id
        ))),
    }
}

/// Validates and runs one check.
pub fn run_check(
    id: CheckId,
    f: &FunctionSpec,
    q: &CheckParams,
    cfg: &HarnessConfig,
) -> Result<CheckOutcome> {
    validate_check(id, f, q)?;
    match id {
        CheckId::Direct => checks::check_direct(f, q, cfg),
        CheckId::InverseSum => checks::check_inverse_sum(f, q, cfg),
        CheckId::Hierarchy => checks::check_hierarchy(f, q, cfg),
        CheckId::Equivalence => checks::check_equivalence(f, q, cfg),
        CheckId::SharpMarchaud => sharp::check_sharp_marchaud(f, q, cfg),
        CheckId::SharpJackson => sharp::check_sharp_jackson(f, q, cfg),
        CheckId::Characterization => checks::check_characterization(f, q, cfg),
        CheckId::PnGrowth => checks::check_pn_growth(f, q, cfg),
        CheckId::WeightedTransfer => weighted::check_weighted_transfer(f, q, cfg),
        CheckId::WeightedJackson => weighted::check_weighted_jackson(f, q, cfg),
        CheckId::WeightedInverse => weighted::check_weighted_inverse(f, q, cfg),
    }
}
