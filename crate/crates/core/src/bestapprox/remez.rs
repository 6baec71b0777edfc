//! Weighted Remez exchange for `inf ‖(f - P) w‖_∞`.

use std::f64::consts::PI;

use nalgebra::{DMatrix, DVector};

use super::{check_dimension, ApproxMethod, Basis, PolyApprox};
use crate::chebyshev::{basis_values, clenshaw, ChebSeries};
use crate::error::Result;
use crate::function::RealFunction;
use crate::numerics::{golden_max, JacobiWeight};

pub const REMEZ_MAX_ITERS: usize = 100;
const CONVERGED_GAP: f64 = 1e-10;
const CERT_REL: f64 = 1e-8;
const FLOOR_REL: f64 = 1e-15;
// Rounding noise in evaluating the residual, in units of the floor.
const NOISE_FLOORS: f64 = 10.0;
const MIN_PIECE_POINTS: usize = 2000;
const GOLDEN_ITERS: usize = 60;

/// `E_n(f)_∞` by Remez exchange.
pub fn best_uniform(f: &RealFunction, n: usize) -> Result<PolyApprox> {
    best_weighted_uniform(f, n, JacobiWeight::UNIT)
}

/// `inf_{P ∈ 𝒫_n} ‖(f - P) w‖_∞`; the residual `(f - P) w` equioscillates.
pub fn best_weighted_uniform(f: &RealFunction, n: usize, w: JacobiWeight) -> Result<PolyApprox> {
    check_dimension(n)?;
    Remez::new(f, n, w).run()
}

struct Remez<'a> {
    f: &'a RealFunction,
    n: usize,
    w: JacobiWeight,
    xs: Vec<f64>,
    fw: Vec<f64>,
    ws: Vec<f64>,
    floor: f64,
}

#[derive(Clone, Copy)]
struct Point {
    x: f64,
    e: f64,
}

impl<'a> Remez<'a> {
    fn new(f: &'a RealFunction, n: usize, w: JacobiWeight) -> Self {
        let mut cuts = vec![-1.0];
        cuts.extend(f.singular_points().iter().copied().filter(|s| -1.0 < *s && *s < 1.0));
        cuts.push(1.0);
        let per_piece = MIN_PIECE_POINTS.max(64 * n);
        let mut xs = Vec::new();
        for piece in cuts.windows(2) {
            let (c, d) = (0.5 * (piece[0] + piece[1]), 0.5 * (piece[1] - piece[0]));
            for j in (0..per_piece).rev() {
                let x = match j {
                    0 => piece[1],
                    _ if j == per_piece - 1 => piece[0],
                    _ => c + d * (PI * j as f64 / (per_piece - 1) as f64).cos(),
                };
                if xs.last().is_none_or(|&l| x > l) {
                    xs.push(x);
                }
            }
        }
        let mut grid = Vec::with_capacity(xs.len());
        let mut fw = Vec::with_capacity(xs.len());
        let mut ws = Vec::with_capacity(xs.len());
        for x in xs {
            let wx = w.eval(x);
            let v = f.eval(x) * wx;
            if wx > 0.0 && v.is_finite() {
                grid.push(x);
                fw.push(v);
                ws.push(wx);
            }
        }
        let scale = fw.iter().fold(0.0_f64, |m, v| m.max(v.abs()));
        Self {
            f,
            n,
            w,
            xs: grid,
            fw,
            ws,
            floor: FLOOR_REL * scale.max(f64::MIN_POSITIVE),
        }
    }

    fn err_at(&self, c: &[f64], x: f64) -> f64 {
        let wx = self.w.eval(x);
        if wx == 0.0 {
            return 0.0;
        }
        let v = (self.f.eval(x) - clenshaw(c, x)) * wx;
        if v.is_finite() {
            v
        } else {
            0.0
        }
    }

    /// Sign-run maxima of the residual over the grid merged with `extra`,
    /// each polished by golden-section search.
    fn extrema(&self, c: &[f64], extra: &[Point]) -> (Vec<Point>, f64) {
        let mut pts: Vec<Point> = self
            .xs
            .iter()
            .enumerate()
            .map(|(i, &x)| Point {
                x,
                e: self.fw[i] - clenshaw(c, x) * self.ws[i],
            })
            .collect();
        if !extra.is_empty() {
            pts.extend(extra.iter().map(|p| Point {
                x: p.x,
                e: self.err_at(c, p.x),
            }));
            pts.sort_by(|a, b| a.x.total_cmp(&b.x));
            pts.dedup_by(|a, b| a.x == b.x);
        }
        let mut runs: Vec<usize> = Vec::new();
        let mut sign = 0.0;
        for (i, p) in pts.iter().enumerate() {
            if p.e == 0.0 {
                continue;
            }
            let s = p.e.signum();
            if s != sign {
                runs.push(i);
                sign = s;
            } else if let Some(last) = runs.last_mut() {
                if p.e.abs() > pts[*last].e.abs() {
                    *last = i;
                }
            }
        }
        let mut out = Vec::with_capacity(runs.len());
        let mut max_abs: f64 = 0.0;
        for &i in &runs {
            let p = pts[i];
            let lo = pts[i.saturating_sub(1)].x;
            let hi = pts[(i + 1).min(pts.len() - 1)].x;
            let mut best = p;
            if hi > lo {
                let (x, v) = golden_max(|x| self.err_at(c, x).abs(), lo, hi, GOLDEN_ITERS);
                let e = self.err_at(c, x);
                if v > p.e.abs() && e.signum() == p.e.signum() {
                    best = Point { x, e };
                }
            }
            max_abs = max_abs.max(best.e.abs());
            out.push(best);
        }
        (out, max_abs)
    }

    /// Reference from the sign-run maxima of the interpolant at `dim`
    /// Chebyshev points, or the Chebyshev extrema when there are too few.
    fn initial_reference(&self, dim: usize) -> Vec<Point> {
        let need = self.n + 1;
        let interp = ChebSeries::interpolate(|x| self.f.eval(x), dim);
        let (ext, _) = self.extrema(&interp.coeffs, &[]);
        if ext.len() >= need {
            return select(ext, need);
        }
        // nearest grid points to the Chebyshev extrema
        let mut out: Vec<Point> = Vec::with_capacity(need);
        for i in 0..need {
            let target = -(PI * i as f64 / self.n as f64).cos();
            let j = self.xs.partition_point(|&x| x < target).min(self.xs.len() - 1);
            let j = if j > 0 && (self.xs[j - 1] - target).abs() < (self.xs[j] - target).abs() {
                j - 1
            } else {
                j
            };
            if out.last().is_none_or(|p| self.xs[j] > p.x) {
                out.push(Point { x: self.xs[j], e: 0.0 });
            }
        }
        out
    }

    /// Exchange iterations from `reference`; returns the last iterate with
    /// its error and whether the levelled error met it.
    fn exchange(&self, mut reference: Vec<Point>, noise: f64) -> Option<(Vec<f64>, f64, bool)> {
        let need = self.n + 1;
        let mut best: Option<(Vec<f64>, f64, bool)> = None;
        if reference.len() != need {
            return None;
        }
        for _ in 0..REMEZ_MAX_ITERS {
            let Some((c, level)) = self.level(&reference) else {
                break;
            };
            let (ext, max_abs) = self.extrema(&c, &reference);
            let done = max_abs - level.abs() <= (CONVERGED_GAP * max_abs).max(noise);
            if best.as_ref().is_none_or(|b| max_abs < b.1) {
                best = Some((c, max_abs, done));
            }
            if done || ext.len() < need {
                break;
            }
            let next = select(ext, need);
            if next.iter().zip(&reference).all(|(a, b)| a.x == b.x) {
                break;
            }
            reference = next;
        }
        best
    }

    /// Levelled solve `Σ c_j T_j(x_i) w(x_i) + (-1)^i E = f(x_i) w(x_i)`.
    fn level(&self, reference: &[Point]) -> Option<(Vec<f64>, f64)> {
        let m = self.n + 1;
        let mut a = DMatrix::<f64>::zeros(m, m);
        let mut b = DVector::<f64>::zeros(m);
        let mut t = vec![0.0; self.n];
        for (i, p) in reference.iter().enumerate() {
            let wx = self.w.eval(p.x);
            basis_values(p.x, &mut t);
            for (j, tj) in t.iter().enumerate() {
                a[(i, j)] = tj * wx;
            }
            a[(i, self.n)] = if i % 2 == 0 { 1.0 } else { -1.0 };
            b[i] = self.f.eval(p.x) * wx;
        }
        let sol = a.lu().solve(&b)?;
        if sol.iter().any(|v| !v.is_finite()) {
            return None;
        }
        Some((sol.as_slice()[..self.n].to_vec(), sol[self.n]))
    }

    fn run(&self) -> Result<PolyApprox> {
        let interp = ChebSeries::interpolate(|x| self.f.eval(x), self.n).coeffs;
        let (_, interp_err) = self.extrema(&interp, &[]);
        // the interpolant is admissible; below the noise level nothing beats it
        let mut best = (interp, interp_err);
        let mut converged = false;
        let noise = NOISE_FLOORS * self.floor;
        if interp_err > noise {
            // A symmetric reference of even size levels an even f at zero
            // and stalls. The restart takes one more Chebyshev point and
            // drops an end of its alternation set.
            for dim in [self.n, self.n + 1] {
                if let Some((c, err, done)) = self.exchange(self.initial_reference(dim), noise) {
                    if err < best.1 {
                        best = (c, err);
                        converged = done;
                    } else if done && err <= best.1 * (1.0 + CERT_REL) {
                        // the seed was already optimal, e.g. T_n for x^n
                        converged = true;
                    }
                    if done {
                        break;
                    }
                }
            }
        }
        let (coeffs, err) = best;
        let certified = converged && self.certify(&coeffs, err);
        Ok(PolyApprox {
            n: self.n,
            basis: Basis::Chebyshev,
            coeffs,
            err,
            method: ApproxMethod::Remez,
            certified,
        })
    }

    /// At least `n + 1` alternating extrema within `1e-8` relative of `err`.
    fn certify(&self, c: &[f64], err: f64) -> bool {
        if err <= self.floor {
            return false;
        }
        let (ext, _) = self.extrema(c, &[]);
        let mut count = 0;
        let mut sign = 0.0;
        for p in ext {
            if p.e.abs() >= (1.0 - CERT_REL) * err && p.e.signum() != sign {
                count += 1;
                sign = p.e.signum();
            }
        }
        count >= self.n + 1
    }
}

/// Reduces an alternating list to `need` points, keeping the largest.
fn select(mut pts: Vec<Point>, need: usize) -> Vec<Point> {
    while pts.len() > need {
        if pts.len() - need == 1 {
            if pts[0].e.abs() < pts[pts.len() - 1].e.abs() {
                pts.remove(0);
            } else {
                pts.pop();
            }
        } else {
            let mut drop = 0;
            let mut drop_val = f64::INFINITY;
            for i in 0..pts.len() - 1 {
                let v = pts[i].e.abs().max(pts[i + 1].e.abs());
                if v < drop_val {
                    drop_val = v;
                    drop = i;
                }
            }
            pts.drain(drop..drop + 2);
        }
    }
    pts
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn abs_with_constants() {
        let f = RealFunction::new(|x: f64| x.abs()).with_singular_points(&[0.0]);
        let a = best_uniform(&f, 2).unwrap();
        assert!((a.err - 0.5).abs() < 1e-9, "{}", a.err);
        assert!(a.certified);
        assert!((a.coeffs[0] - 0.5).abs() < 1e-9);
    }

    #[test]
    fn monic_powers() {
        for n in 3..=8 {
            let f = RealFunction::new(move |x: f64| x.powi(n as i32));
            let a = best_uniform(&f, n).unwrap();
            let exact = 2f64.powi(1 - n as i32);
            assert!((a.err - exact).abs() < 1e-8, "n={n}: {}", a.err);
            assert!(a.certified);
        }
    }

    #[test]
    fn even_function_odd_dimension() {
        // n = 11 levels a symmetric 12-point reference at zero
        let f = RealFunction::new(|x: f64| x.abs().powf(1.5)).with_singular_points(&[0.0]);
        let a11 = best_uniform(&f, 11).unwrap();
        let a9 = best_uniform(&f, 9).unwrap();
        assert!(a11.certified);
        assert!(a11.err < 0.9 * a9.err, "{} vs {}", a11.err, a9.err);
    }

    #[test]
    fn polynomial_inside_space() {
        let f = RealFunction::new(|x: f64| 1.0 - 2.0 * x + x * x * x);
        let a = best_uniform(&f, 5).unwrap();
        assert!(a.err <= 1e-12);
    }
}
