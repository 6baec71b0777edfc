use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Default ratio: eight points per octave.
pub const DEFAULT_RATIO: f64 = 0.917_004_043_204_671_2; // 2^{-1/8}

/// Descending geometric sequence `hi, hi·ratio, …` down to `lo`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GeometricGrid {
    pub lo: f64,
    pub hi: f64,
    pub ratio: f64,
}

impl GeometricGrid {
    pub fn new(lo: f64, hi: f64, ratio: f64) -> Result<Self> {
        if !(lo > 0.0 && hi >= lo && ratio > 0.0 && ratio < 1.0) {
            return Err(Error::InvalidArgument(format!(
                "geometric grid needs 0 < lo <= hi and ratio in (0,1); got lo={lo}, hi={hi}, ratio={ratio}"
            )));
        }
        Ok(Self { lo, hi, ratio })
    }

    pub fn with_default_ratio(lo: f64, hi: f64) -> Result<Self> {
        Self::new(lo, hi, DEFAULT_RATIO)
    }

    /// Points `hi·ratio^j` for `j = 0..=J` with `J = ⌊log(hi/lo)/log(1/ratio)⌋`.
    pub fn points(&self) -> Vec<f64> {
        let steps = ((self.hi / self.lo).ln() / (1.0 / self.ratio).ln() + 1e-9).floor() as i32;
        (0..=steps.max(0))
            .map(|j| self.hi * self.ratio.powi(j))
            .collect()
    }
}
