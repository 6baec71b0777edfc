use std::collections::BTreeMap;
use std::fmt::{self, Write as _};

use serde::{Deserialize, Serialize};
use serde_json::Value;

use super::params::CheckId;
use crate::numerics::{fit_loglog_slope, fitted_constant};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ScaleAxis {
    N,
    T,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "UPPERCASE")]
pub enum Verdict {
    Pass,
    Degenerate,
    Fail,
}

impl fmt::Display for Verdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Self::Pass => "PASS",
            Self::Fail => "FAIL",
            Self::Degenerate => "DEGENERATE",
        })
    }
}

/// How the fitted log-log slope of the ratio is judged.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SlopeRule {
    /// `|slope| ≤ slack`.
    TwoSided,
    /// `slope ≤ slack`.
    AtMost,
    /// `slope ≥ -slack`.
    AtLeast,
    /// `max ratio / min ratio ≤ band_max`; the slope is reported only.
    Band,
}

/// Tolerances shared by every check.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct HarnessConfig {
    pub slope_slack: f64,
    pub band_max: f64,
    /// Values below `zero_rel · sup|f|` count as zero.
    pub zero_rel: f64,
    pub tail_uncertainty_max: f64,
    /// Margin on the measured modulus slope in the forward hypothesis of the
    /// characterization checks.
    pub forward_margin: f64,
    /// Margin on the measured `E_n` slope in their converse hypothesis.
    pub converse_margin: f64,
    pub min_rows: usize,
}

impl Default for HarnessConfig {
    fn default() -> Self {
        Self {
            slope_slack: 0.15,
            band_max: 100.0,
            zero_rel: 1e-10,
            tail_uncertainty_max: 0.2,
            forward_margin: 0.1,
            converse_margin: 0.05,
            min_rows: 3,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Row {
    pub scale: f64,
    pub lhs: f64,
    pub rhs: f64,
    /// `lhs / rhs`; absent for rows where either side vanishes.
    pub ratio: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RatioReport {
    pub check_id: CheckId,
    pub variant: String,
    pub function: String,
    pub scale_axis: ScaleAxis,
    pub rows: Vec<Row>,
    pub c_fit: Option<f64>,
    pub slope: Option<f64>,
    /// `max ratio / min ratio` over the nondegenerate rows.
    pub band: Option<f64>,
    pub degenerate_rows: usize,
    pub rule: SlopeRule,
    /// Unasserted reports are informational and never affect a verdict.
    pub asserted: bool,
    pub verdict: Verdict,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub note: Option<String>,
    pub metadata: BTreeMap<String, Value>,
}

impl RatioReport {
    /// `scale,lhs,rhs,ratio` with a header and 17 significant digits.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("scale,lhs,rhs,ratio\r\n");
        for r in &self.rows {
            let ratio = r.ratio.map(fmt17).unwrap_or_default();
            let _ = write!(out, "{},{},{},{}\r\n", fmt17(r.scale), fmt17(r.lhs), fmt17(r.rhs), ratio);
        }
        out
    }
}

/// Scientific notation with 17 significant digits.
pub(crate) fn fmt17(v: f64) -> String {
    if v.is_finite() {
        format!("{v:.16e}")
    } else if v.is_nan() {
        "nan".into()
    } else if v > 0.0 {
        "inf".into()
    } else {
        "-inf".into()
    }
}

/// Assembles a [`RatioReport`] and applies the verdict rules.
pub struct ReportBuilder {
    report: RatioReport,
    zero_floor: f64,
    hypothesis: Option<String>,
}

impl ReportBuilder {
    pub fn new(check_id: CheckId, variant: &str, function: &str, axis: ScaleAxis) -> Self {
        Self {
            report: RatioReport {
                check_id,
                variant: variant.to_string(),
                function: function.to_string(),
                scale_axis: axis,
                rows: Vec::new(),
                c_fit: None,
                slope: None,
                band: None,
                degenerate_rows: 0,
                rule: SlopeRule::TwoSided,
                asserted: true,
                verdict: Verdict::Degenerate,
                note: None,
                metadata: BTreeMap::new(),
            },
            zero_floor: 0.0,
            hypothesis: None,
        }
    }

    pub fn rows(mut self, scales: &[f64], lhs: &[f64], rhs: &[f64]) -> Self {
        self.report.rows = scales
            .iter()
            .zip(lhs)
            .zip(rhs)
            .map(|((&scale, &lhs), &rhs)| Row {
                scale,
                lhs,
                rhs,
                ratio: None,
            })
            .collect();
        self
    }

    pub fn rule(mut self, rule: SlopeRule) -> Self {
        self.report.rule = rule;
        self
    }

    pub fn zero_floor(mut self, floor: f64) -> Self {
        self.zero_floor = floor;
        self
    }

    pub fn asserted(mut self, asserted: bool) -> Self {
        self.report.asserted = asserted;
        self
    }

    pub fn meta(mut self, key: &str, value: impl Into<Value>) -> Self {
        self.report.metadata.insert(key.to_string(), value.into());
        self
    }

    /// A failed hypothesis makes the report vacuous.
    pub fn hypothesis(mut self, holds: bool, note: impl Into<String>) -> Self {
        if !holds && self.hypothesis.is_none() {
            self.hypothesis = Some(note.into());
        }
        self
    }

    pub fn note(mut self, note: impl Into<String>) -> Self {
        self.report.note = Some(note.into());
        self
    }

    pub fn finish(self, cfg: &HarnessConfig) -> RatioReport {
        let Self {
            mut report,
            zero_floor,
            hypothesis,
        } = self;
        report
            .rows
            .sort_by(|a, b| a.scale.total_cmp(&b.scale));
        let mut violation = false;
        let mut broken = false;
        let mut degenerate = 0;
        for row in &mut report.rows {
            if !(row.lhs.is_finite() && row.rhs.is_finite()) {
                broken = true;
                continue;
            }
            let lz = row.lhs <= zero_floor;
            let rz = row.rhs <= zero_floor;
            match (lz, rz) {
                (false, false) => row.ratio = Some(row.lhs / row.rhs),
                (false, true) => {
                    row.ratio = Some(f64::INFINITY);
                    violation = true;
                }
                _ => degenerate += 1,
            }
        }
        report.degenerate_rows = degenerate;
        let (scales, ratios): (Vec<f64>, Vec<f64>) = report
            .rows
            .iter()
            .filter_map(|r| r.ratio.filter(|v| v.is_finite()).map(|v| (r.scale, v)))
            .unzip();
        if !ratios.is_empty() && !violation {
            let ones = vec![1.0; ratios.len()];
            report.c_fit = fitted_constant(&ratios, &ones).ok().map(|c| c.0);
            let lo = ratios.iter().copied().fold(f64::INFINITY, f64::min);
            let hi = ratios.iter().copied().fold(0.0, f64::max);
            report.band = Some(hi / lo);
        }
        if ratios.len() >= cfg.min_rows.max(2) {
            report.slope = fit_loglog_slope(&scales, &ratios).ok().map(|f| f.slope);
        }
        let slack = cfg.slope_slack;
        report.verdict = if broken {
            report.note.get_or_insert_with(|| "non-finite value in a row".into());
            Verdict::Fail
        } else if let Some(h) = hypothesis {
            report.note = Some(h);
            Verdict::Degenerate
        } else if violation {
            report.note.get_or_insert_with(|| "left side positive where right side vanishes".into());
            Verdict::Fail
        } else if ratios.len() < cfg.min_rows {
            Verdict::Degenerate
        } else {
            let ok = match (report.rule, report.slope, report.band) {
                (SlopeRule::Band, _, Some(b)) => b <= cfg.band_max,
                (SlopeRule::TwoSided, Some(s), _) => s.abs() <= slack,
                (SlopeRule::AtMost, Some(s), _) => s <= slack,
                (SlopeRule::AtLeast, Some(s), _) => s >= -slack,
                _ => false,
            };
            if ok && report.c_fit.is_some_and(f64::is_finite) {
                Verdict::Pass
            } else {
                Verdict::Fail
            }
        };
        report
    }
}

/// All reports of one check on one function.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CheckOutcome {
    pub check_id: CheckId,
    pub function: String,
    pub verdict: Verdict,
    pub reports: Vec<RatioReport>,
}

impl CheckOutcome {
    /// FAIL if an asserted report fails, PASS if one passes, else DEGENERATE.
    pub fn new(check_id: CheckId, function: &str, reports: Vec<RatioReport>) -> Self {
        let asserted = || reports.iter().filter(|r| r.asserted);
        let verdict = if asserted().any(|r| r.verdict == Verdict::Fail) {
            Verdict::Fail
        } else if asserted().any(|r| r.verdict == Verdict::Pass) {
            Verdict::Pass
        } else {
            Verdict::Degenerate
        };
        Self {
            check_id,
            function: function.to_string(),
            verdict,
            reports,
        }
    }

    pub fn report(&self, variant: &str) -> Option<&RatioReport> {
        self.reports.iter().find(|r| r.variant == variant)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("reports serialize")
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn build(lhs: &[f64], rhs: &[f64]) -> RatioReport {
        let scales: Vec<f64> = (1..=lhs.len()).map(|i| i as f64).collect();
        ReportBuilder::new(CheckId::Direct, "main", "f", ScaleAxis::N)
            .rows(&scales, lhs, rhs)
            .zero_floor(1e-12)
            .finish(&HarnessConfig::default())
    }

    #[test]
    fn verdict_rules() {
        let r = build(&[2.0, 4.0, 6.0, 8.0], &[1.0, 2.0, 3.0, 4.0]);
        assert_eq!(r.verdict, Verdict::Pass);
        assert_eq!(r.c_fit, Some(2.0));
        for row in &r.rows {
            assert!(r.c_fit.unwrap() * row.rhs >= row.lhs);
        }
        let r = build(&[1.0, 4.0, 9.0, 16.0], &[1.0, 2.0, 3.0, 4.0]);
        assert_eq!(r.verdict, Verdict::Fail);
        let r = build(&[0.0, 1e-16, 0.0], &[0.0, 0.0, 1e-17]);
        assert_eq!(r.verdict, Verdict::Degenerate);
        assert_eq!(r.degenerate_rows, 3);
        let r = build(&[1.0, 1.0, 1.0], &[1.0, 0.0, 1.0]);
        assert_eq!(r.verdict, Verdict::Fail);
    }

    #[test]
    fn csv_format() {
        let r = build(&[1.0, 1.0, 0.0], &[2.0, 2.0, 2.0]);
        let csv = r.to_csv();
        let mut lines = csv.lines();
        assert_eq!(lines.next(), Some("scale,lhs,rhs,ratio"));
        assert_eq!(
            lines.next(),
            Some("1.0000000000000000e0,1.0000000000000000e0,2.0000000000000000e0,5.0000000000000000e-1")
        );
        assert!(csv.ends_with("0.0000000000000000e0,2.0000000000000000e0,\r\n"));
    }
}
