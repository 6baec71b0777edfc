//! Experiment configuration: strict JSON, schema 1, unknown keys rejected.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::path::PathBuf;

use serde::{Deserialize, Serialize};

use crate::corpus::corpus_get;
use crate::harness::{validate_check, CheckId, CheckParams, HarnessConfig};
use crate::numerics::JacobiWeight;

pub const SCHEMA_VERSION: u32 = 1;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum EmitFormat {
    Csv,
    Json,
    Svg,
}

fn default_emit() -> BTreeSet<EmitFormat> {
    [EmitFormat::Csv, EmitFormat::Json].into_iter().collect()
}

fn default_output_dir() -> PathBuf {
    PathBuf::from("smoothlab-out")
}

fn default_slack() -> f64 {
    HarnessConfig::default().slope_slack
}

/// One check with its parameters, run on `functions` (or on the config's
/// function list when absent).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CheckEntry {
    pub id: CheckId,
    /// Distinguishes several entries of the same check in file names and in
    /// the summary. Defaults to the check id.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub label: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub functions: Option<Vec<String>>,
    pub params: CheckParams,
}

impl CheckEntry {
    pub fn label(&self) -> &str {
        self.label.as_deref().unwrap_or(self.id.as_str())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub schema: u32,
    pub functions: Vec<String>,
    pub checks: Vec<CheckEntry>,
    #[serde(default = "default_output_dir")]
    pub output_dir: PathBuf,
    #[serde(default = "default_emit")]
    pub emit: BTreeSet<EmitFormat>,
    #[serde(default = "default_slack")]
    pub slope_slack: f64,
    /// Recorded in the summary. No check samples randomly, so it does not
    /// change any number.
    #[serde(default)]
    pub seed: u64,
}

/// A rejected configuration, located by line when possible.
#[derive(Debug, Clone, PartialEq)]
pub struct ConfigError {
    pub line: Option<usize>,
    pub message: String,
}

impl fmt::Display for ConfigError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.line {
            Some(l) => write!(f, "line {l}: {}", self.message),
            None => f.write_str(&self.message),
        }
    }
}

impl std::error::Error for ConfigError {}

/// One (entry, function) pair of a validated configuration.
#[derive(Debug, Clone, PartialEq)]
pub struct Cell {
    pub entry: usize,
    pub check_id: CheckId,
    pub label: String,
    pub function: String,
    pub params: CheckParams,
    /// `label__function`, the stem of every file written for the cell.
    pub stem: String,
}

impl ExperimentConfig {
    pub fn harness_config(&self) -> HarnessConfig {
        HarnessConfig {
            slope_slack: self.slope_slack,
            ..HarnessConfig::default()
        }
    }

    /// Every cell, in entry order and then function order.
    pub fn cells(&self) -> Vec<Cell> {
        self.checks
            .iter()
            .enumerate()
            .flat_map(|(i, e)| {
                let fns = e.functions.as_ref().unwrap_or(&self.functions);
                fns.iter().map(move |f| Cell {
                    entry: i,
                    check_id: e.id,
                    label: e.label().to_string(),
                    function: f.clone(),
                    params: e.params.clone(),
                    stem: format!("{}__{}", e.label(), f),
                })
            })
            .collect()
    }
}

/// Parses and validates `text`. Nothing is computed beyond the precondition
/// checks of each cell.
pub fn parse_config(text: &str) -> Result<ExperimentConfig, ConfigError> {
    let cfg: ExperimentConfig = serde_json::from_str(text).map_err(|e| ConfigError {
        line: (e.line() > 0).then_some(e.line()),
        message: e.to_string(),
    })?;
    validate_config(&cfg, text)?;
    Ok(cfg)
}

fn validate_config(cfg: &ExperimentConfig, text: &str) -> Result<(), ConfigError> {
    let at = |path: &[Seg], message: String| ConfigError {
        line: value_line(text, path),
        message,
    };
    if cfg.schema != SCHEMA_VERSION {
        return Err(at(
            &[Seg::Key("schema")],
            format!("unsupported schema {} (expected {SCHEMA_VERSION})", cfg.schema),
        ));
    }
    if !(cfg.slope_slack > 0.0 && cfg.slope_slack.is_finite()) {
        return Err(at(&[Seg::Key("slope_slack")], "slope_slack must be positive".into()));
    }
    for (i, f) in cfg.functions.iter().enumerate() {
        if let Err(e) = corpus_get(f) {
            return Err(at(&[Seg::Key("functions"), Seg::Index(i)], e.to_string()));
        }
    }
    if cfg.checks.is_empty() {
        return Err(at(&[Seg::Key("checks")], "no checks".into()));
    }
    let mut seen: BTreeMap<String, usize> = BTreeMap::new();
    for (i, e) in cfg.checks.iter().enumerate() {
        let here = [Seg::Key("checks"), Seg::Index(i)];
        let label = e.label();
        if label.is_empty() || label.contains(['/', '\\']) || label.contains("__") {
            return Err(at(&here, format!("bad label {label:?}")));
        }
        let w = e.params.weight;
        if let Err(err) = JacobiWeight::new(w.alpha, w.beta) {
            return Err(at(&here, err.to_string()));
        }
        let fns = e.functions.as_ref().unwrap_or(&cfg.functions);
        if fns.is_empty() {
            return Err(at(&here, format!("{label}: no functions")));
        }
        for (j, fid) in fns.iter().enumerate() {
            let f = corpus_get(fid).map_err(|err| {
                let path = if e.functions.is_some() {
                    vec![Seg::Key("checks"), Seg::Index(i), Seg::Key("functions"), Seg::Index(j)]
                } else {
                    here.to_vec()
                };
                at(&path, err.to_string())
            })?;
            if let Err(err) = validate_check(e.id, &f, &e.params) {
                return Err(at(&here, format!("{label} on {fid}: {err}")));
            }
            let stem = format!("{label}__{fid}");
            if let Some(prev) = seen.insert(stem.clone(), i) {
                return Err(at(
                    &here,
                    format!("cell {stem} already defined by checks[{prev}]; use distinct labels"),
                ));
            }
        }
    }
    Ok(())
}

#[derive(Debug, Clone, Copy, PartialEq)]
enum Seg {
    Key(&'static str),
    Index(usize),
}

/// Line (1-based) at which the value addressed by `path` starts in the JSON
/// `text`. Only used after serde accepted the text, so the scanner may assume
/// well-formed input.
fn value_line(text: &str, path: &[Seg]) -> Option<usize> {
    let b = text.as_bytes();
    let mut pos = 0;
    for seg in path {
        skip_ws(b, &mut pos);
        match (*seg, b.get(pos)?) {
            (Seg::Key(key), b'{') => {
                pos += 1;
                loop {
                    skip_ws(b, &mut pos);
                    if b.get(pos)? == &b'}' {
                        return None;
                    }
                    let name = read_string(b, &mut pos)?;
                    skip_ws(b, &mut pos);
                    pos += 1; // ':'
                    skip_ws(b, &mut pos);
                    if name == key {
                        break;
                    }
                    skip_value(b, &mut pos)?;
                    skip_ws(b, &mut pos);
                    if b.get(pos)? == &b',' {
                        pos += 1;
                    }
                }
            }
            (Seg::Index(idx), b'[') => {
                pos += 1;
                for _ in 0..idx {
                    skip_ws(b, &mut pos);
                    skip_value(b, &mut pos)?;
                    skip_ws(b, &mut pos);
                    if b.get(pos)? != &b',' {
                        return None;
                    }
                    pos += 1;
                }
                skip_ws(b, &mut pos);
            }
            _ => return None,
        }
    }
    skip_ws(b, &mut pos);
    Some(1 + b[..pos.min(b.len())].iter().filter(|&&c| c == b'\n').count())
}

fn skip_ws(b: &[u8], pos: &mut usize) {
    while b.get(*pos).is_some_and(|c| c.is_ascii_whitespace()) {
        *pos += 1;
    }
}

fn read_string(b: &[u8], pos: &mut usize) -> Option<String> {
    if b.get(*pos)? != &b'"' {
        return None;
    }
    let start = *pos;
    skip_value(b, pos)?;
    serde_json::from_slice(&b[start..*pos]).ok()
}

fn skip_value(b: &[u8], pos: &mut usize) -> Option<()> {
    match *b.get(*pos)? {
        b'"' => {
            *pos += 1;
            loop {
                match *b.get(*pos)? {
                    b'\\' => *pos += 2,
                    b'"' => {
                        *pos += 1;
                        return Some(());
                    }
                    _ => *pos += 1,
                }
            }
        }
        open @ (b'{' | b'[') => {
            let close = if open == b'{' { b'}' } else { b']' };
            *pos += 1;
            loop {
                skip_ws(b, pos);
                match *b.get(*pos)? {
                    c if c == close => {
                        *pos += 1;
                        return Some(());
                    }
                    b',' | b':' => *pos += 1,
                    _ => skip_value(b, pos)?,
                }
            }
        }
        _ => {
            while b
                .get(*pos)
                .is_some_and(|c| !matches!(c, b',' | b']' | b'}') && !c.is_ascii_whitespace())
            {
                *pos += 1;
            }
            Some(())
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const GOOD: &str = r#"{
  "schema": 1,
  "functions": ["poly_cheb_2", "abs_pow_1.5"],
  "checks": [
    {"id": "direct", "params": {"k": 2, "r": 1, "p": "inf", "n_range": {"lo": 4, "hi": 16}}},
    {
      "id": "hierarchy",
      "label": "hier_p2",
      "functions": ["exp"],
      "params": {"k": 2, "r": 1, "p": 2, "t_grid": {"lo": 0.05, "hi": 0.5}}
    }
  ]
}"#;

    #[test]
    fn parses_and_expands_cells() {
        let cfg = parse_config(GOOD).unwrap();
        let stems: Vec<String> = cfg.cells().into_iter().map(|c| c.stem).collect();
        assert_eq!(stems, ["direct__poly_cheb_2", "direct__abs_pow_1.5", "hier_p2__exp"]);
        assert_eq!(cfg.slope_slack, 0.15);
        assert!(cfg.emit.contains(&EmitFormat::Json) && !cfg.emit.contains(&EmitFormat::Svg));
    }

    #[test]
    fn errors_carry_lines() {
        let bad_id = GOOD.replace("\"hierarchy\"", "\"hierarchical\"");
        let e = parse_config(&bad_id).unwrap_err();
        assert_eq!(e.line, Some(7), "{e}");

        let bad_fn = GOOD.replace("[\"exp\"]", "[\"nope\"]");
        let e = parse_config(&bad_fn).unwrap_err();
        assert_eq!(e.line, Some(9), "{e}");

        let unknown_key = GOOD.replace("\"label\"", "\"lable\"");
        assert_eq!(parse_config(&unknown_key).unwrap_err().line, Some(8));

        // hierarchy needs k >= 2
        let precondition = GOOD.replace("\"k\": 2, \"r\": 1, \"p\": 2", "\"k\": 1, \"r\": 1, \"p\": 2");
        let e = parse_config(&precondition).unwrap_err();
        assert_eq!(e.line, Some(6), "{e}");

        let schema = GOOD.replace("\"schema\": 1", "\"schema\": 2");
        assert_eq!(parse_config(&schema).unwrap_err().line, Some(2));
    }

    #[test]
    fn duplicate_cells_rejected() {
        let entry = r#"{"id": "direct", "params": {"k": 2, "r": 1, "p": "inf", "n_range": {"lo": 4, "hi": 16}}}"#;
        let text = format!(
            "{{\"schema\": 1, \"functions\": [\"abs_pow_1.5\"],\n\"checks\": [\n{entry},\n{entry}\n]}}"
        );
        let e = parse_config(&text).unwrap_err();
        assert_eq!(e.line, Some(4), "{e}");
        assert!(e.message.contains("already defined"), "{e}");
    }

    #[test]
    fn locator_handles_nesting() {
        let text = "{\n \"a\": {\"x\": [1, {\"y\": \"}\"}]},\n \"b\": [\n  true,\n  null\n ]\n}";
        assert_eq!(value_line(text, &[Seg::Key("b"), Seg::Index(1)]), Some(5));
        assert_eq!(value_line(text, &[Seg::Key("a")]), Some(2));
        assert_eq!(value_line(text, &[Seg::Key("c")]), None);
    }
}
