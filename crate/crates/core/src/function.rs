use std::fmt;
use std::sync::Arc;

use crate::numerics::JacobiWeight;

/// A real function on `[-1, 1]` together with the points where it (or its
/// derivatives) fail to be smooth.
///
/// Evaluators are pure and may be shared across threads. At a point where the
/// function is unbounded the evaluator returns an infinite value.
#[derive(Clone)]
pub struct RealFunction {
    eval: Arc<dyn Fn(f64) -> f64 + Send + Sync>,
    singular_points: Arc<[f64]>,
}

impl RealFunction {
    pub fn new(f: impl Fn(f64) -> f64 + Send + Sync + 'static) -> Self {
        Self {
            eval: Arc::new(f),
            singular_points: Arc::from(Vec::new()),
        }
    }

    pub fn with_singular_points(mut self, points: &[f64]) -> Self {
        let mut pts: Vec<f64> = points.to_vec();
        pts.sort_by(f64::total_cmp);
        pts.dedup();
        self.singular_points = Arc::from(pts);
        self
    }

    #[inline]
    pub fn eval(&self, x: f64) -> f64 {
        (self.eval)(x)
    }

    pub fn singular_points(&self) -> &[f64] {
        &self.singular_points
    }

    /// `c * f`.
    pub fn scaled(&self, c: f64) -> Self {
        let f = self.eval.clone();
        Self {
            eval: Arc::new(move |x| c * f(x)),
            singular_points: self.singular_points.clone(),
        }
    }

    /// `a * f + b * g`, with the union of both singular sets.
    pub fn linear_combination(a: f64, f: &Self, b: f64, g: &Self) -> Self {
        let fe = f.eval.clone();
        let ge = g.eval.clone();
        let mut pts: Vec<f64> = f.singular_points.to_vec();
        pts.extend_from_slice(&g.singular_points);
        Self::new(move |x| a * fe(x) + b * ge(x)).with_singular_points(&pts)
    }

    /// Largest finite value of `|f·w|` over a fixed Chebyshev sample; used to
    /// set absolute noise floors.
    pub fn scale(&self, w: JacobiWeight) -> f64 {
        const N: usize = 257;
        (0..N)
            .map(|j| {
                let x = (std::f64::consts::PI * (j as f64 + 0.5) / N as f64).cos();
                (self.eval(x) * w.eval(x)).abs()
            })
            .filter(|v| v.is_finite())
            .fold(0.0, f64::max)
    }

    /// Borrow the evaluator as a plain closure.
    pub fn as_fn(&self) -> impl Fn(f64) -> f64 + Sync + '_ {
        move |x| self.eval(x)
    }
}

impl fmt::Debug for RealFunction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("RealFunction")
            .field("singular_points", &self.singular_points)
            .finish_non_exhaustive()
    }
}

/// The Ditzian–Totik step-weight `φ(x) = sqrt(1 - x^2)`, evaluated as
/// `sqrt((1 - x)(1 + x))` so that it stays accurate next to `±1`.
#[inline]
pub fn phi(x: f64) -> f64 {
    let s = (1.0 - x) * (1.0 + x);
    if s <= 0.0 {
        0.0
    } else {
        s.sqrt()
    }
}
