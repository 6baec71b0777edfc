use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

/// Polynomial `Σ c_j T_j(x)` in the Chebyshev basis of the first kind.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ChebSeries {
    pub coeffs: Vec<f64>,
}

impl ChebSeries {
    pub fn new(coeffs: Vec<f64>) -> Self {
        Self { coeffs }
    }

    pub fn zero(n: usize) -> Self {
        Self {
            coeffs: vec![0.0; n],
        }
    }

    /// The single basis polynomial `T_n`.
    pub fn basis(n: usize) -> Self {
        let mut coeffs = vec![0.0; n + 1];
        coeffs[n] = 1.0;
        Self { coeffs }
    }

    pub fn len(&self) -> usize {
        self.coeffs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.coeffs.is_empty()
    }

    /// Clenshaw recurrence.
    #[inline]
    pub fn eval(&self, x: f64) -> f64 {
        clenshaw(&self.coeffs, x)
    }

    /// Exact derivative via `c'_{j-1} = c'_{j+1} + 2 j c_j`.
    pub fn derivative(&self) -> Self {
        let n = self.coeffs.len();
        if n <= 1 {
            return Self::zero(n.max(1) - 1);
        }
        let mut d = vec![0.0; n - 1];
        for j in (1..n).rev() {
            let next = if j + 1 < n - 1 { d[j + 1] } else { 0.0 };
            d[j - 1] = next + 2.0 * j as f64 * self.coeffs[j];
        }
        d[0] *= 0.5;
        Self { coeffs: d }
    }

    pub fn nth_derivative(&self, m: usize) -> Self {
        let mut s = self.clone();
        for _ in 0..m {
            if s.coeffs.is_empty() {
                break;
            }
            s = s.derivative();
        }
        s
    }

    /// An antiderivative, normalized to vanish at `x = 0`.
    pub fn antiderivative(&self) -> Self {
        let n = self.coeffs.len();
        if n == 0 {
            return Self::zero(0);
        }
        let c = |j: usize| if j < n { self.coeffs[j] } else { 0.0 };
        let mut out = vec![0.0; n + 1];
        for (j, o) in out.iter_mut().enumerate().skip(1) {
            let prev = if j == 1 { 2.0 * c(0) } else { c(j - 1) };
            *o = (prev - c(j + 1)) / (2.0 * j as f64);
        }
        let mut s = Self { coeffs: out };
        s.coeffs[0] = -s.eval(0.0);
        s
    }

    /// Monomial coefficients `a_0 + a_1 x + …`; diagnostics only.
    pub fn to_monomial(&self) -> Vec<f64> {
        let n = self.coeffs.len();
        let mut out = vec![0.0; n];
        if n == 0 {
            return out;
        }
        let mut t_prev = vec![0.0; n];
        let mut t_cur = vec![0.0; n];
        t_prev[0] = 1.0;
        for (i, a) in out.iter_mut().enumerate().take(n) {
            *a += self.coeffs[0] * t_prev[i];
        }
        if n == 1 {
            return out;
        }
        t_cur[1] = 1.0;
        for (i, a) in out.iter_mut().enumerate() {
            *a += self.coeffs[1] * t_cur[i];
        }
        for j in 2..n {
            let mut t_next = vec![0.0; n];
            for i in 0..n {
                let shifted = if i > 0 { 2.0 * t_cur[i - 1] } else { 0.0 };
                t_next[i] = shifted - t_prev[i];
            }
            for (i, a) in out.iter_mut().enumerate() {
                *a += self.coeffs[j] * t_next[i];
            }
            t_prev = t_cur;
            t_cur = t_next;
        }
        out
    }

    /// Interpolant in `𝒫_n` at the Chebyshev points of the first kind.
    pub fn interpolate(f: impl Fn(f64) -> f64, n: usize) -> Self {
        if n == 0 {
            return Self::zero(0);
        }
        let nodes: Vec<f64> = (0..n)
            .map(|i| (PI * (i as f64 + 0.5) / n as f64).cos())
            .collect();
        let vals: Vec<f64> = nodes.iter().map(|&x| f(x)).collect();
        let coeffs = (0..n)
            .map(|j| {
                let s: f64 = (0..n)
                    .map(|i| vals[i] * (PI * j as f64 * (i as f64 + 0.5) / n as f64).cos())
                    .sum();
                let scale = if j == 0 { 1.0 } else { 2.0 };
                scale * s / n as f64
            })
            .collect();
        Self { coeffs }
    }
}

#[inline]
pub fn clenshaw(c: &[f64], x: f64) -> f64 {
    let mut b1 = 0.0;
    let mut b2 = 0.0;
    let x2 = 2.0 * x;
    for &cj in c.iter().skip(1).rev() {
        let b0 = cj + x2 * b1 - b2;
        b2 = b1;
        b1 = b0;
    }
    match c.first() {
        Some(&c0) => c0 + x * b1 - b2,
        None => 0.0,
    }
}

/// `T_0(x), …, T_{n-1}(x)`.
#[inline]
pub fn basis_values(x: f64, out: &mut [f64]) {
    let n = out.len();
    if n == 0 {
        return;
    }
    out[0] = 1.0;
    if n > 1 {
        out[1] = x;
    }
    for j in 2..n {
        out[j] = 2.0 * x * out[j - 1] - out[j - 2];
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn clenshaw_matches_cosines() {
        let s = ChebSeries::basis(7);
        for &x in &[-0.9, -0.2, 0.0, 0.4, 1.0] {
            let exact = (7.0 * f64::acos(x)).cos();
            assert!((s.eval(x) - exact).abs() < 1e-14);
        }
    }

    #[test]
    fn derivative_of_t3_is_3u2() {
        let d = ChebSeries::basis(3).derivative();
        // 3 U_2 = 3 (4x^2 - 1) = 6 T_2 + 3 T_0
        assert_eq!(d.coeffs, vec![3.0, 0.0, 6.0]);
        assert!(ChebSeries::basis(0).derivative().coeffs.iter().all(|&c| c == 0.0));
    }

    #[test]
    fn antiderivative_inverts_derivative() {
        let s = ChebSeries::new(vec![0.3, -1.0, 0.25, 2.0, 0.5]);
        let back = s.antiderivative().derivative();
        for (a, b) in back.coeffs.iter().zip(&s.coeffs) {
            assert!((a - b).abs() < 1e-14);
        }
        assert!(s.antiderivative().eval(0.0).abs() < 1e-15);
    }

    #[test]
    fn monomial_conversion() {
        // x^2 = (T_0 + T_2)/2
        let s = ChebSeries::new(vec![0.5, 0.0, 0.5]);
        let m = s.to_monomial();
        assert!((m[0]).abs() < 1e-15 && (m[2] - 1.0).abs() < 1e-15);
    }

    #[test]
    fn interpolation_reproduces_polynomials() {
        let s = ChebSeries::interpolate(|x| 1.0 + x - 3.0 * x * x * x, 4);
        assert!((s.eval(0.37) - (1.0 + 0.37 - 3.0 * 0.37f64.powi(3))).abs() < 1e-14);
        let mut b = [0.0; 5];
        basis_values(0.3, &mut b);
        assert!((b[4] - ChebSeries::basis(4).eval(0.3)).abs() < 1e-15);
    }
}
