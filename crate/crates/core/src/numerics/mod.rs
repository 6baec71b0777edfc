//! Norms, grids and fits shared by every other module.

mod fit;
mod grid;
mod quadrature;
mod search;
mod weight;

pub use fit::{fit_loglog_slope, fitted_constant, LogLogFit};
pub use grid::{GeometricGrid, DEFAULT_RATIO};
pub use quadrature::{
    adapted_rule, adaptive_theta, adaptive_theta_with, gauss_legendre, weighted_lp_norm, NormQuery, QuadratureRule,
    ThetaIntegral, EXCLUSION_RADIUS, SUP_MIN_SAMPLES, SUP_SAMPLES,
};
pub use search::{golden_max, golden_min};
pub use weight::{JacobiWeight, LpExponent, MIN_WEIGHT_EXPONENT};
