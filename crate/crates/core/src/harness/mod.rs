//! Empirical checks of the direct, inverse, equivalence and sharp
//! inequalities. Each check evaluates both sides over a sweep of scales and
//! judges the log-log trend of their ratio.
//!
//! An inequality `lhs ≤ c·rhs` with an unknown constant is accepted when the
//! ratio has no log-log trend beyond the configured slack and its supremum
//! over the sample is finite.

mod checks;
mod params;
mod report;
mod sharp;
mod support;
mod weighted;

pub use checks::{
    check_characterization, check_direct, check_equivalence, check_hierarchy,
    check_inverse_sum, check_pn_growth,
};
pub use params::{run_check, validate_check, CheckId, CheckParams, NRange, TGrid};
pub use report::{
    CheckOutcome, HarnessConfig, RatioReport, ReportBuilder, Row, ScaleAxis, SlopeRule, Verdict,
};
pub use sharp::{check_sharp_jackson, check_sharp_marchaud};
pub use weighted::{check_weighted_inverse, check_weighted_jackson, check_weighted_transfer};
