//! Finite differences: symmetric, restricted symmetric, forward and backward.
//!
//! All alternating sums are accumulated with Neumaier compensation; the
//! binomial coefficients are exact integers.

use std::sync::OnceLock;

use crate::error::{Error, Result};

/// Largest supported difference order.
pub const MAX_ORDER: usize = 30;

fn binomial_table() -> &'static Vec<Vec<u64>> {
    static TABLE: OnceLock<Vec<Vec<u64>>> = OnceLock::new();
    TABLE.get_or_init(|| {
        let mut rows: Vec<Vec<u64>> = vec![vec![1]];
        for n in 1..=MAX_ORDER {
            let prev = &rows[n - 1];
            let mut row = vec![1u64; n + 1];
            for i in 1..n {
                row[i] = prev[i - 1] + prev[i];
            }
            rows.push(row);
        }
        rows
    })
}

/// `C(k, i)` for `k ≤ 30`.
pub fn binomial(k: usize, i: usize) -> u64 {
    binomial_table()[k][i]
}

/// Order `k`, step `h` and base point `x` of one difference.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DiffQuery {
    pub x: f64,
    pub h: f64,
    pub k: usize,
}

impl DiffQuery {
    pub fn new(x: f64, h: f64, k: usize) -> Result<Self> {
        if k == 0 || k > MAX_ORDER {
            return Err(Error::DifferenceOrder(k));
        }
        if !(h > 0.0) {
            return Err(Error::InvalidArgument(format!("step must be positive, got {h}")));
        }
        Ok(Self { x, h, k })
    }

    // Construction without validation for hot loops that already checked k.
    #[inline]
    pub(crate) fn raw(x: f64, h: f64, k: usize) -> Self {
        Self { x, h, k }
    }

    #[inline]
    fn symmetric_node(&self, i: usize) -> f64 {
        self.x + (i as f64 - 0.5 * self.k as f64) * self.h
    }
}

/// Neumaier-compensated accumulator.
#[derive(Default, Clone, Copy)]
struct Compensated {
    sum: f64,
    comp: f64,
}

impl Compensated {
    #[inline]
    fn add(&mut self, v: f64) {
        let t = self.sum + v;
        if self.sum.abs() >= v.abs() {
            self.comp += (self.sum - t) + v;
        } else {
            self.comp += (v - t) + self.sum;
        }
        self.sum = t;
    }

    #[inline]
    fn value(self) -> f64 {
        self.sum + self.comp
    }
}

#[inline]
fn alternating_sum(k: usize, sign_flip: bool, mut node: impl FnMut(usize) -> f64) -> f64 {
    let row = &binomial_table()[k];
    let mut acc = Compensated::default();
    for (i, &c) in row.iter().enumerate() {
        // (-1)^{k-i} for central and forward, (-1)^i for backward
        let negative = if sign_flip { i % 2 == 1 } else { (k - i) % 2 == 1 };
        let term = c as f64 * node(i);
        acc.add(if negative { -term } else { term });
    }
    acc.value()
}

/// `Δ^k_h(f, x) = Σ C(k,i) (-1)^{k-i} f(x + (i - k/2) h)` with no domain checks.
#[inline]
pub fn symmetric_diff(f: &(impl Fn(f64) -> f64 + ?Sized), q: DiffQuery) -> f64 {
    alternating_sum(q.k, false, |i| f(q.symmetric_node(i)))
}

/// Symmetric difference for an `f` defined only on `[lo, hi]`.
pub fn symmetric_diff_in(
    f: &(impl Fn(f64) -> f64 + ?Sized),
    q: DiffQuery,
    domain: (f64, f64),
) -> Result<f64> {
    let first = q.symmetric_node(0);
    let last = q.symmetric_node(q.k);
    if first < domain.0 || last > domain.1 {
        return Err(Error::NodeOutOfDomain);
    }
    Ok(symmetric_diff(f, q))
}

/// `Δ^k_h(f, x; [-1, 1])`: the symmetric difference when `x ± kh/2 ∈ [-1, 1]`,
/// zero otherwise.
#[inline]
pub fn restricted_symmetric_diff(f: &(impl Fn(f64) -> f64 + ?Sized), q: DiffQuery) -> f64 {
    if symmetric_in_domain(q) {
        symmetric_diff(f, q)
    } else {
        0.0
    }
}

/// Exact closed-interval gate `x ± kh/2 ∈ [-1, 1]`.
#[inline]
pub fn symmetric_in_domain(q: DiffQuery) -> bool {
    q.symmetric_node(0) >= -1.0 && q.symmetric_node(q.k) <= 1.0
}

/// Forward difference `Σ C(k,i) (-1)^{k-i} f(x + ih)` when `x, x + kh ∈ [-1, 1]`.
#[inline]
pub fn forward_diff(f: &(impl Fn(f64) -> f64 + ?Sized), q: DiffQuery) -> f64 {
    let end = q.x + q.k as f64 * q.h;
    if q.x < -1.0 || q.x > 1.0 || end > 1.0 {
        return 0.0;
    }
    alternating_sum(q.k, false, |i| f(q.x + i as f64 * q.h))
}

/// Backward difference `Σ C(k,i) (-1)^i f(x - ih)` when `x - kh, x ∈ [-1, 1]`.
#[inline]
pub fn backward_diff(f: &(impl Fn(f64) -> f64 + ?Sized), q: DiffQuery) -> f64 {
    let end = q.x - q.k as f64 * q.h;
    if q.x < -1.0 || q.x > 1.0 || end < -1.0 {
        return 0.0;
    }
    alternating_sum(q.k, true, |i| f(q.x - i as f64 * q.h))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn q(x: f64, h: f64, k: usize) -> DiffQuery {
        DiffQuery::new(x, h, k).unwrap()
    }

    #[test]
    fn symmetric_examples() {
        let sq = |x: f64| x * x;
        assert!((symmetric_diff(&sq, q(0.3, 0.1, 2)) - 0.02).abs() < 1e-15);
        assert!((symmetric_diff(&|x: f64| x, q(0.0, 0.4, 1)) - 0.4).abs() < 1e-15);
        assert_eq!(symmetric_diff(&|x: f64| x.abs(), q(0.0, 0.6, 1)), 0.0);
    }

    #[test]
    fn restricted_examples() {
        let sq = |x: f64| x * x;
        assert_eq!(restricted_symmetric_diff(&sq, q(0.99, 0.2, 2)), 0.0);
        assert!((restricted_symmetric_diff(&sq, q(0.0, 0.2, 2)) - 0.08).abs() < 1e-15);
        assert_eq!(restricted_symmetric_diff(&|x: f64| x.exp(), q(1.0, 1e-3, 3)), 0.0);
    }

    #[test]
    fn one_sided_examples() {
        let sq = |x: f64| x * x;
        assert!((forward_diff(&sq, q(-1.0, 0.1, 2)) - 0.02).abs() < 1e-15);
        let cube = |x: f64| x * x * x;
        // direct summation f(1) - 3 f(0.9) + 3 f(0.8) - f(0.7)
        let direct: f64 = 1.0 - 3.0 * 0.729 + 3.0 * 0.512 - 0.343;
        assert!((direct - 0.006).abs() < 1e-15);
        assert!((backward_diff(&cube, q(1.0, 0.1, 3)) - 0.006).abs() < 1e-14);
        assert_eq!(forward_diff(&sq, q(0.95, 0.1, 2)), 0.0);
        assert_eq!(backward_diff(&sq, q(-0.95, 0.1, 2)), 0.0);
    }

    #[test]
    fn domain_checked_variant() {
        let sq = |x: f64| x * x;
        assert_eq!(
            symmetric_diff_in(&sq, q(0.95, 0.2, 2), (-1.0, 1.0)),
            Err(Error::NodeOutOfDomain)
        );
        assert!(symmetric_diff_in(&sq, q(0.5, 0.2, 2), (-1.0, 1.0)).is_ok());
    }

    #[test]
    fn rejects_bad_orders() {
        assert_eq!(DiffQuery::new(0.0, 0.1, 0), Err(Error::DifferenceOrder(0)));
        assert_eq!(DiffQuery::new(0.0, 0.1, 31), Err(Error::DifferenceOrder(31)));
        assert!(DiffQuery::new(0.0, 0.0, 2).is_err());
        assert_eq!(binomial(30, 15), 155_117_520);
    }
}
