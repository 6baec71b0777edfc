use crate::error::{Error, Result};

/// Least-squares line through `(ln x, ln y)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LogLogFit {
    pub slope: f64,
    pub intercept: f64,
    /// Largest absolute residual in log space.
    pub max_residual: f64,
}

pub fn fit_loglog_slope(xs: &[f64], ys: &[f64]) -> Result<LogLogFit> {
    if xs.len() != ys.len() || xs.len() < 3 {
        return Err(Error::InvalidArgument(
            "log fit needs at least three (x, y) pairs".into(),
        ));
    }
    if ys.iter().any(|&y| !(y > 0.0)) {
        return Err(Error::NonpositiveLogData);
    }
    if xs.iter().any(|&x| !(x > 0.0)) {
        return Err(Error::NonpositiveLogData);
    }
    let increasing = xs.windows(2).all(|w| w[1] > w[0]);
    let decreasing = xs.windows(2).all(|w| w[1] < w[0]);
    if !(increasing || decreasing) {
        return Err(Error::InvalidArgument(
            "log fit abscissae must be strictly monotone".into(),
        ));
    }
    let lx: Vec<f64> = xs.iter().map(|x| x.ln()).collect();
    let ly: Vec<f64> = ys.iter().map(|y| y.ln()).collect();
    let n = lx.len() as f64;
    let mx = lx.iter().sum::<f64>() / n;
    let my = ly.iter().sum::<f64>() / n;
    let sxx: f64 = lx.iter().map(|x| (x - mx) * (x - mx)).sum();
    let sxy: f64 = lx.iter().zip(&ly).map(|(x, y)| (x - mx) * (y - my)).sum();
    let slope = sxy / sxx;
    let intercept = my - slope * mx;
    let max_residual = lx
        .iter()
        .zip(&ly)
        .map(|(x, y)| (y - (intercept + slope * x)).abs())
        .fold(0.0, f64::max);
    Ok(LogLogFit {
        slope,
        intercept,
        max_residual,
    })
}

/// Smallest `c` with `lhs ≤ c·rhs` on the sample, and the index attaining it.
pub fn fitted_constant(lhs: &[f64], rhs: &[f64]) -> Result<(f64, usize)> {
    if lhs.len() != rhs.len() || lhs.is_empty() {
        return Err(Error::InvalidArgument(
            "fitted_constant needs equal, nonempty inputs".into(),
        ));
    }
    if rhs.iter().any(|&r| !(r > 0.0)) {
        return Err(Error::InvalidArgument(
            "fitted_constant needs positive right-hand sides".into(),
        ));
    }
    let mut best = (f64::NEG_INFINITY, 0);
    for (i, (l, r)) in lhs.iter().zip(rhs).enumerate() {
        let c = l / r;
        if c > best.0 {
            best = (c, i);
        }
    }
    Ok(best)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn exact_power_laws() {
        let f = fit_loglog_slope(&[1.0, 2.0, 4.0], &[1.0, 4.0, 16.0]).unwrap();
        assert!((f.slope - 2.0).abs() < 1e-14);
        let f = fit_loglog_slope(&[1.0, 2.0, 4.0], &[3.0, 3.0, 3.0]).unwrap();
        assert!(f.slope.abs() < 1e-14);
        let xs = [2.0, 4.0, 8.0, 16.0];
        let ys: Vec<f64> = xs.iter().map(|x: &f64| 7.3 * x.powf(-1.5)).collect();
        let f = fit_loglog_slope(&xs, &ys).unwrap();
        assert!((f.slope + 1.5).abs() < 1e-12);
        assert!(f.max_residual < 1e-12);
    }

    #[test]
    fn log_fit_rejects_nonpositive() {
        assert_eq!(
            fit_loglog_slope(&[1.0, 2.0, 3.0], &[1.0, 0.0, 1.0]),
            Err(Error::NonpositiveLogData)
        );
    }

    #[test]
    fn constants() {
        assert_eq!(fitted_constant(&[1.0, 2.0], &[2.0, 2.0]).unwrap(), (1.0, 1));
        assert_eq!(fitted_constant(&[0.0, 0.0], &[1.0, 1.0]).unwrap(), (0.0, 0));
        assert_eq!(fitted_constant(&[3.0, 1.0, 2.0], &[1.0, 1.0, 1.0]).unwrap(), (3.0, 0));
    }
}
