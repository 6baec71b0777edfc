//! Upper bounds for the K-functionals
//!
//! `K^φ_{k,r}(f^{(r)}, t^k)_p = inf_g ‖(f^{(r)} - g^{(r)}) φ^r‖_p + t^k ‖g^{(k+r)} φ^{k+r}‖_p`
//!
//! and `K_{k,φ}(f, t^k)_{w,p} = inf_g ‖(f - g) w‖_p + t^k ‖w φ^k g^{(k)}‖_p`,
//! with polynomial competitors only.
//!
//! For a polynomial `g` the first functional is the second one applied to
//! `F = f^{(r)}` with weight `φ^r` and competitor `G = g^{(r)}`, so both
//! share one search. For each competitor dimension the search is seeded with
//! the best weighted approximants of `F`; for each `(dimension, t)` cell the
//! two coefficients carrying most of the penalty are then rescaled by
//! coordinate descent on a discretized objective. All competitors found for
//! any `t` of a sweep are pooled, so the reported value is monotone in `t`
//! and in the set of search degrees.

use std::collections::BTreeMap;
use std::f64::consts::PI;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::bestapprox::l2::Discrete;
use crate::bestapprox::{
    best_weighted_l2, best_weighted_uniform, residual_norm, series_derivative_norm, ApproxMethod,
    Basis, PolyApprox,
};
use crate::chebyshev::{clenshaw, ChebSeries};
use crate::corpus::FunctionSpec;
use crate::error::{Error, Result};
use crate::function::RealFunction;
use crate::numerics::{golden_min, JacobiWeight, LpExponent};

/// Largest default competitor dimension.
pub const DEFAULT_MAX_DEGREE: usize = 48;
const REFINE_PASSES: usize = 3;
const REFINE_COEFFS: usize = 2;
const REFINE_GOLDEN_ITERS: usize = 40;
/// Cells whose penalty is outside this factor of the first term are not refined.
const REFINE_BAND: f64 = 1e3;
const SUP_POINTS_PER_PIECE: usize = 4097;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct KQuery {
    pub k: usize,
    #[serde(default)]
    pub r: usize,
    pub t: f64,
    pub p: LpExponent,
    #[serde(default)]
    pub w: Option<JacobiWeight>,
    /// Dimensions `m` of the competitor spaces `𝒫_m`.
    pub search_degrees: Vec<usize>,
}

impl KQuery {
    pub fn new(k: usize, r: usize, t: f64, p: LpExponent) -> Self {
        Self {
            k,
            r,
            t,
            p,
            w: None,
            search_degrees: (k + r..=DEFAULT_MAX_DEGREE.max(k + r)).collect(),
        }
    }

    pub fn with_weight(mut self, w: JacobiWeight) -> Self {
        self.w = Some(w);
        self
    }

    pub fn with_degrees(mut self, degrees: Vec<usize>) -> Self {
        self.search_degrees = degrees;
        self
    }

    pub fn validate(&self) -> Result<()> {
        if self.k == 0 {
            return Err(Error::DifferenceOrder(0));
        }
        if !(self.t > 0.0) {
            return Err(Error::InvalidArgument(format!("t must be positive, got {}", self.t)));
        }
        if self.search_degrees.is_empty() {
            return Err(Error::InvalidArgument("empty search degree set".into()));
        }
        if let Some(&m) = self.search_degrees.iter().find(|&&m| m < self.k + self.r) {
            return Err(Error::InvalidArgument(format!(
                "search degree {m} below k + r = {}",
                self.k + self.r
            )));
        }
        Ok(())
    }
}

/// An upper bound for a K-functional and the competitor attaining it.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct KEstimate {
    pub t: f64,
    pub value: f64,
    pub first_term: f64,
    pub penalty: f64,
    /// The competitor `g ∈ 𝒫_n`; its `err` field holds the first term.
    pub best_g: PolyApprox,
    /// Always true: polynomial competitors only bound the infimum from above.
    pub upper_bound: bool,
}

/// `K^φ_{k,r}(f^{(r)}, t^k)_p` from above.
pub fn k_functional_new_upper(f: &FunctionSpec, q: &KQuery) -> Result<KEstimate> {
    Ok(k_new_upper_sweep(f, q, &[q.t])?.remove(0))
}

/// `K_{k,φ}(f, t^k)_{w,p}` from above; the weight is `q.w` or unit.
pub fn k_functional_weighted_upper(f: &RealFunction, q: &KQuery) -> Result<KEstimate> {
    Ok(k_weighted_upper_sweep(f, q, &[q.t])?.remove(0))
}

/// [`k_functional_new_upper`] at every `t` of `ts`, over one pooled
/// competitor set.
pub fn k_new_upper_sweep(f: &FunctionSpec, q: &KQuery, ts: &[f64]) -> Result<Vec<KEstimate>> {
    q.validate()?;
    if !f.b_rp_member(q.r, q.p) {
        return Err(Error::InvalidArgument(format!(
            "{} is not in B^{}_{}",
            f.id, q.r, q.p
        )));
    }
    let fr = f
        .deriv(q.r)
        .ok_or_else(|| Error::InvalidArgument(format!("{} has no derivative {}", f.id, q.r)))?;
    let dims: Vec<usize> = q.search_degrees.iter().map(|m| m - q.r).collect();
    let search = Search::new(&fr, JacobiWeight::phi_pow(q.r), q.k, q.p, &dims, ts)?;
    Ok(search
        .into_estimates(ts)
        .into_iter()
        .map(|mut e| {
            let mut g = ChebSeries::new(e.best_g.coeffs.clone());
            for _ in 0..q.r {
                g = g.antiderivative();
            }
            e.best_g.n += q.r;
            e.best_g.coeffs = g.coeffs;
            e.best_g.coeffs.resize(e.best_g.n, 0.0);
            e
        })
        .collect())
}

/// [`k_functional_weighted_upper`] at every `t` of `ts`.
pub fn k_weighted_upper_sweep(f: &RealFunction, q: &KQuery, ts: &[f64]) -> Result<Vec<KEstimate>> {
    q.validate()?;
    let w = q.w.unwrap_or(JacobiWeight::UNIT);
    let search = Search::new(f, w, q.k, q.p, &q.search_degrees, ts)?;
    Ok(search.into_estimates(ts))
}

#[derive(Debug, Clone)]
struct Candidate {
    coeffs: Vec<f64>,
    method: ApproxMethod,
    first: f64,
    penalty: f64,
}

struct Search {
    k: usize,
    pool: Vec<Candidate>,
}

impl Search {
    fn new(
        f: &RealFunction,
        w: JacobiWeight,
        k: usize,
        p: LpExponent,
        dims: &[usize],
        ts: &[f64],
    ) -> Result<Self> {
        if ts.iter().any(|t| !(*t > 0.0)) {
            return Err(Error::InvalidArgument("t must be positive".into()));
        }
        let mut dims = dims.to_vec();
        dims.sort_unstable();
        dims.dedup();

        let seeds: Vec<Vec<Candidate>> = dims
            .par_iter()
            .map(|&d| seeds_for(f, w, k, p, d))
            .collect::<Result<_>>()?;
        let mut pool: Vec<Candidate> = Vec::new();
        if let Some(zero) = admissible(f, w, k, p, vec![0.0], ApproxMethod::ProjectionL2)? {
            pool.push(zero);
        }
        let best_per_dim: Vec<Candidate> = seeds
            .iter()
            .filter_map(|s| {
                s.iter()
                    .min_by(|a, b| a.first.total_cmp(&b.first))
                    .cloned()
            })
            .collect();
        pool.extend(seeds.into_iter().flatten());
        if pool.is_empty() {
            return Err(Error::NoAdmissibleCompetitor);
        }

        let cells: Vec<(usize, f64)> = (0..best_per_dim.len())
            .flat_map(|i| ts.iter().map(move |&t| (i, t)))
            .filter(|&(i, t)| {
                let c = &best_per_dim[i];
                let tb = t.powi(k as i32) * c.penalty;
                c.first > 0.0 && tb >= c.first / REFINE_BAND && tb <= c.first * REFINE_BAND
            })
            .collect();
        // One sampler per size class, so the refinement of a competitor does
        // not depend on which other dimensions are searched.
        let mut classes: Vec<usize> = cells
            .iter()
            .map(|&(i, _)| sampler_class(best_per_dim[i].coeffs.len()))
            .collect();
        classes.sort_unstable();
        classes.dedup();
        let samplers: BTreeMap<usize, Sampler> = classes
            .into_iter()
            .map(|m| Ok((m, Sampler::new(f, w, k, p, m)?)))
            .collect::<Result<_>>()?;
        let refined: Vec<Option<Candidate>> = cells
            .par_iter()
            .map(|&(i, t)| {
                let seed = &best_per_dim[i];
                let sampler = &samplers[&sampler_class(seed.coeffs.len())];
                let coeffs = sampler.refine(&seed.coeffs, t);
                admissible(f, w, k, p, coeffs, seed.method)
            })
            .collect::<Result<_>>()?;
        pool.extend(refined.into_iter().flatten());
        Ok(Self { k, pool })
    }

    fn into_estimates(self, ts: &[f64]) -> Vec<KEstimate> {
        ts.iter()
            .map(|&t| {
                let tk = t.powi(self.k as i32);
                let mut best = 0;
                let mut best_val = f64::INFINITY;
                for (i, c) in self.pool.iter().enumerate() {
                    let v = c.first + tk * c.penalty;
                    if v < best_val {
                        best_val = v;
                        best = i;
                    }
                }
                let c = &self.pool[best];
                KEstimate {
                    t,
                    value: best_val,
                    first_term: c.first,
                    penalty: c.penalty,
                    best_g: PolyApprox {
                        n: c.coeffs.len(),
                        basis: Basis::Chebyshev,
                        coeffs: c.coeffs.clone(),
                        err: c.first,
                        method: c.method,
                        certified: false,
                    },
                    upper_bound: true,
                }
            })
            .collect()
    }
}

/// Sampler size for competitors of dimension `d`.
fn sampler_class(d: usize) -> usize {
    d.max(16).next_power_of_two()
}

/// Best weighted approximants of dimension `d`: the projection always, and
/// the Remez solution for `p = ∞`.
fn seeds_for(
    f: &RealFunction,
    w: JacobiWeight,
    k: usize,
    p: LpExponent,
    d: usize,
) -> Result<Vec<Candidate>> {
    let mut out = Vec::new();
    let mut approximants = Vec::new();
    match best_weighted_l2(f, d, w) {
        Ok(a) => approximants.push(a),
        Err(Error::NormDivergent) => {}
        Err(e) => return Err(e),
    }
    if p.is_infinite() {
        approximants.push(best_weighted_uniform(f, d, w)?);
    }
    for a in approximants {
        if let Some(c) = admissible(f, w, k, p, a.coeffs, a.method)? {
            out.push(c);
        }
    }
    Ok(out)
}

/// Both terms by continuous norms; `None` when the first term diverges.
fn admissible(
    f: &RealFunction,
    w: JacobiWeight,
    k: usize,
    p: LpExponent,
    coeffs: Vec<f64>,
    method: ApproxMethod,
) -> Result<Option<Candidate>> {
    let s = ChebSeries::new(coeffs);
    let first = match residual_norm(f, &s, p, w) {
        Ok(v) => v,
        Err(Error::NormDivergent) => return Ok(None),
        Err(e) => return Err(e),
    };
    let penalty = series_derivative_norm(&s, k, p, w)?;
    Ok(Some(Candidate {
        coeffs: s.coeffs,
        method,
        first,
        penalty,
    }))
}

/// Fixed nodes for the discretized objective: quadrature nodes for finite
/// `p`, a dense arccos-clustered grid for `p = ∞`.
struct Sampler {
    k: usize,
    p: LpExponent,
    xs: Vec<f64>,
    lambda: Vec<f64>,
    fw: Vec<f64>,
    wx: Vec<f64>,
    wphik: Vec<f64>,
    /// Sampled `‖w φ^k T_j^{(k)}‖_p` for `j < max_dim`.
    tk_norms: Vec<f64>,
}

impl Sampler {
    fn new(f: &RealFunction, w: JacobiWeight, k: usize, p: LpExponent, max_dim: usize) -> Result<Self> {
        let wk = w.times_phi_pow(k);
        let (xs, lambda, wx) = if p.is_infinite() {
            let mut cuts = vec![-1.0];
            cuts.extend(f.singular_points().iter().copied().filter(|s| s.abs() < 1.0));
            cuts.push(1.0);
            let mut xs = Vec::new();
            for piece in cuts.windows(2) {
                let (c, d) = (0.5 * (piece[0] + piece[1]), 0.5 * (piece[1] - piece[0]));
                let m = SUP_POINTS_PER_PIECE;
                for j in (0..m).rev() {
                    let x = c + d * (PI * j as f64 / (m - 1) as f64).cos();
                    if xs.last().is_none_or(|&l| x > l) {
                        xs.push(x);
                    }
                }
            }
            let keep: Vec<f64> = xs
                .into_iter()
                .filter(|&x| (f.eval(x) * w.eval(x)).is_finite())
                .collect();
            let wx = keep.iter().map(|&x| w.eval(x)).collect();
            let lambda = vec![1.0; keep.len()];
            (keep, lambda, wx)
        } else {
            let d = Discrete::new(f, max_dim.max(1), w)?;
            (d.xs, d.lambda, d.wx)
        };
        let fw = xs.iter().zip(&wx).map(|(&x, &wv)| f.eval(x) * wv).collect();
        let wphik: Vec<f64> = xs.iter().map(|&x| wk.eval(x)).collect();
        let mut out = Self {
            k,
            p,
            xs,
            lambda,
            fw,
            wx,
            wphik,
            tk_norms: Vec::new(),
        };
        out.tk_norms = (0..max_dim)
            .into_par_iter()
            .map(|j| {
                if j < k {
                    0.0
                } else {
                    out.norm(out.basis_derivative(j).into_iter())
                }
            })
            .collect();
        Ok(out)
    }

    fn basis_derivative(&self, j: usize) -> Vec<f64> {
        let dj = ChebSeries::basis(j).nth_derivative(self.k);
        self.xs
            .iter()
            .zip(&self.wphik)
            .map(|(&x, &wk)| dj.eval(x) * wk)
            .collect()
    }

    fn norm(&self, v: impl Iterator<Item = f64>) -> f64 {
        if self.p.is_infinite() {
            v.fold(0.0, |m, x| m.max(x.abs()))
        } else {
            let p = self.p.value();
            let s: f64 = v.zip(&self.lambda).map(|(x, l)| l * x.abs().powf(p)).sum();
            s.powf(1.0 / p)
        }
    }

    /// Rescales the two coefficients with the largest penalty contribution.
    fn refine(&self, seed: &[f64], t: f64) -> Vec<f64> {
        let k = self.k;
        let mut c = seed.to_vec();
        if c.len() <= k {
            return c;
        }
        let tk = t.powi(k as i32);
        let mut ranked: Vec<(usize, f64)> = (k..c.len())
            .map(|j| (j, c[j].abs() * self.tk_norms.get(j).copied().unwrap_or(0.0)))
            .collect();
        ranked.sort_by(|a, b| b.1.total_cmp(&a.1).then(a.0.cmp(&b.0)));
        let chosen: Vec<(usize, Vec<f64>)> = ranked
            .iter()
            .take(REFINE_COEFFS)
            .map(|r| (r.0, self.basis_derivative(r.0)))
            .collect();

        let mut resid: Vec<f64> = self
            .xs
            .iter()
            .zip(&self.fw)
            .zip(&self.wx)
            .map(|((&x, &fw), &wv)| fw - clenshaw(&c, x) * wv)
            .collect();
        let dk = ChebSeries::new(c.clone()).nth_derivative(k);
        let mut pen: Vec<f64> = self
            .xs
            .iter()
            .zip(&self.wphik)
            .map(|(&x, &wk)| dk.eval(x) * wk)
            .collect();

        for _ in 0..REFINE_PASSES {
            for (j, bj) in &chosen {
                let j = *j;
                let cj = c[j];
                if cj == 0.0 {
                    continue;
                }
                let tj: Vec<f64> = self
                    .xs
                    .iter()
                    .zip(&self.wx)
                    .map(|(&x, &wv)| ChebSeries::basis(j).eval(x) * wv)
                    .collect();
                // c_j -> s c_j moves the residual by (1-s) c_j T_j w
                let objective = |s: f64| {
                    let d = (1.0 - s) * cj;
                    let a = self.norm(resid.iter().zip(&tj).map(|(r, t)| r + d * t));
                    let b = self.norm(pen.iter().zip(bj).map(|(q, t)| q - d * t));
                    a + tk * b
                };
                let (s, _) = golden_min(objective, 0.0, 1.0, REFINE_GOLDEN_ITERS);
                let d = (1.0 - s) * cj;
                for (r, t) in resid.iter_mut().zip(&tj) {
                    *r += d * t;
                }
                for (q, t) in pen.iter_mut().zip(bj) {
                    *q -= d * t;
                }
                c[j] = s * cj;
            }
        }
        c
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::corpus::corpus_get;

    #[test]
    fn polynomials_have_zero_k() {
        let f = corpus_get("poly_cheb_2").unwrap();
        let q = KQuery::new(2, 1, 0.1, LpExponent::TWO).with_degrees(vec![3, 5]);
        let e = k_functional_new_upper(&f, &q).unwrap();
        assert!(e.value <= 1e-10, "{}", e.value);
        let g = RealFunction::new(|x: f64| 1.0 - x);
        let q = KQuery::new(2, 0, 0.3, LpExponent::INF)
            .with_weight(JacobiWeight::new(0.5, 0.0).unwrap())
            .with_degrees(vec![2, 4]);
        assert!(k_functional_weighted_upper(&g, &q).unwrap().value <= 1e-10);
    }

    #[test]
    fn monotone_sweep() {
        let f = RealFunction::new(|x: f64| x.abs()).with_singular_points(&[0.0]);
        let q = KQuery::new(1, 0, 0.1, LpExponent::TWO).with_degrees(vec![2, 4, 8, 16]);
        let ts = [0.01, 0.02, 0.05, 0.1, 0.2];
        let v = k_weighted_upper_sweep(&f, &q, &ts).unwrap();
        for w in v.windows(2) {
            assert!(w[0].value <= w[1].value);
        }
        assert!(v.iter().all(|e| e.upper_bound));
    }

    #[test]
    fn new_k_is_weighted_k_of_derivative() {
        let f = corpus_get("abs_pow_2.5").unwrap();
        let q = KQuery::new(2, 1, 0.1, LpExponent::TWO).with_degrees(vec![4, 8, 12]);
        let a = k_functional_new_upper(&f, &q).unwrap();
        let qw = KQuery::new(2, 0, 0.1, LpExponent::TWO)
            .with_weight(JacobiWeight::phi_pow(1))
            .with_degrees(vec![3, 7, 11]);
        let b = k_functional_weighted_upper(&f.deriv(1).unwrap(), &qw).unwrap();
        assert!((a.value - b.value).abs() <= 1e-12 * b.value, "{} {}", a.value, b.value);
        // the reported g has g' equal to the weighted competitor
        let gp = ChebSeries::new(a.best_g.coeffs.clone()).derivative();
        for x in [-0.7, 0.1, 0.5] {
            assert!((gp.eval(x) - b.best_g.eval(x)).abs() < 1e-12);
        }
    }

    #[test]
    fn rejects_low_degrees() {
        let f = corpus_get("exp").unwrap();
        let q = KQuery::new(2, 1, 0.1, LpExponent::TWO).with_degrees(vec![2]);
        assert!(k_functional_new_upper(&f, &q).is_err());
    }
}
