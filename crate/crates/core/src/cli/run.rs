//! Executes the cells of a configuration and writes their reports.

use std::collections::BTreeMap;
use std::fs;
use std::io;
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::path::{Path, PathBuf};

use rayon::prelude::*;
use serde::Serialize;

use super::config::{Cell, ConfigError, EmitFormat, ExperimentConfig};
use super::svg::render_loglog;
use crate::corpus::corpus_get;
use crate::harness::{run_check, CheckOutcome, HarnessConfig, Verdict};

pub const EXIT_OK: i32 = 0;
pub const EXIT_FAIL: i32 = 1;
pub const EXIT_NUMERICAL: i32 = 2;
pub const EXIT_CONFIG: i32 = 64;

pub const WORKERS_ENV: &str = "SMOOTHLAB_WORKERS";

/// Worker count from `SMOOTHLAB_WORKERS`, defaulting to the available
/// parallelism.
pub fn workers_from_env() -> Result<usize, ConfigError> {
    match std::env::var(WORKERS_ENV) {
        Ok(v) => match v.trim().parse::<usize>() {
            Ok(n) if n > 0 => Ok(n),
            _ => Err(ConfigError {
                line: None,
                message: format!("{WORKERS_ENV} must be a positive integer, got {v:?}"),
            }),
        },
        Err(_) => Ok(std::thread::available_parallelism().map_or(1, |n| n.get())),
    }
}

#[derive(Debug, Clone)]
pub struct CellResult {
    pub cell: Cell,
    /// The outcome, or the text of the numerical error that stopped the cell.
    pub outcome: Result<CheckOutcome, String>,
}

impl CellResult {
    pub fn verdict_text(&self) -> String {
        match &self.outcome {
            Ok(o) => o.verdict.to_string(),
            Err(_) => "ERROR".into(),
        }
    }
}

#[derive(Debug, Clone)]
pub struct RunSummary {
    pub results: Vec<CellResult>,
    pub seed: u64,
}

#[derive(Serialize)]
struct ReportLine<'a> {
    variant: &'a str,
    verdict: Verdict,
    asserted: bool,
    slope: Option<f64>,
    band: Option<f64>,
    c_fit: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    note: Option<&'a str>,
}

#[derive(Serialize)]
struct CellLine<'a> {
    cell: &'a str,
    check_id: &'a str,
    label: &'a str,
    function: &'a str,
    verdict: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    error: Option<&'a str>,
    reports: Vec<ReportLine<'a>>,
}

impl RunSummary {
    /// 0 when nothing failed, 2 on any numerical error, else 1 on any FAIL.
    pub fn exit_code(&self) -> i32 {
        if self.results.iter().any(|r| r.outcome.is_err()) {
            EXIT_NUMERICAL
        } else if self
            .results
            .iter()
            .any(|r| matches!(&r.outcome, Ok(o) if o.verdict == Verdict::Fail))
        {
            EXIT_FAIL
        } else {
            EXIT_OK
        }
    }

    pub fn get(&self, label: &str, function: &str) -> Option<&CellResult> {
        self.results
            .iter()
            .find(|r| r.cell.label == label && r.cell.function == function)
    }

    fn grid(&self) -> (Vec<&str>, Vec<&str>, BTreeMap<(&str, &str), String>) {
        let mut rows: Vec<&str> = Vec::new();
        let mut cols: Vec<&str> = Vec::new();
        let mut cells = BTreeMap::new();
        for r in &self.results {
            if !rows.contains(&r.cell.label.as_str()) {
                rows.push(&r.cell.label);
            }
            if !cols.contains(&r.cell.function.as_str()) {
                cols.push(&r.cell.function);
            }
            cells.insert((r.cell.label.as_str(), r.cell.function.as_str()), r.verdict_text());
        }
        (rows, cols, cells)
    }

    /// Check × function verdict table as RFC-4180 CSV. Pairs that were not
    /// configured show `-`.
    pub fn table_csv(&self) -> String {
        let (rows, cols, cells) = self.grid();
        let mut out = String::from("check");
        for c in &cols {
            out.push(',');
            out.push_str(c);
        }
        out.push_str("\r\n");
        for r in &rows {
            out.push_str(r);
            for c in &cols {
                out.push(',');
                out.push_str(cells.get(&(*r, *c)).map_or("-", String::as_str));
            }
            out.push_str("\r\n");
        }
        out
    }

    /// The same table aligned for a terminal.
    pub fn table_text(&self) -> String {
        let (rows, cols, cells) = self.grid();
        let w0 = rows.iter().map(|r| r.len()).max().unwrap_or(0).max(5);
        let mut out = format!("{:<w0$}", "check");
        for c in &cols {
            out.push_str(&format!("  {c:<10}"));
        }
        out.push('\n');
        for r in &rows {
            out.push_str(&format!("{r:<w0$}"));
            for c in &cols {
                let v = cells.get(&(*r, *c)).map_or("-", String::as_str);
                out.push_str(&format!("  {v:<w$}", w = c.len().max(10)));
            }
            out.push('\n');
        }
        out
    }

    /// One line per report: cell, variant, verdict, slope and band.
    pub fn details(&self) -> String {
        let mut out = String::new();
        for r in &self.results {
            match &r.outcome {
                Ok(o) => {
                    for rep in &o.reports {
                        let num = |v: Option<f64>| v.map_or("-".into(), |v| format!("{v:.4}"));
                        out.push_str(&format!(
                            "{}\t{}\t{}{}\tslope={}\tband={}{}\n",
                            r.cell.stem,
                            rep.variant,
                            rep.verdict,
                            if rep.asserted { "" } else { " (unasserted)" },
                            num(rep.slope),
                            num(rep.band),
                            rep.note.as_ref().map_or(String::new(), |n| format!("\t{n}"))
                        ));
                    }
                }
                Err(e) => out.push_str(&format!("{}\t-\tERROR\t{e}\n", r.cell.stem)),
            }
        }
        out
    }

    pub fn to_json(&self) -> String {
        let cells: Vec<CellLine> = self
            .results
            .iter()
            .map(|r| CellLine {
                cell: &r.cell.stem,
                check_id: r.cell.check_id.as_str(),
                label: &r.cell.label,
                function: &r.cell.function,
                verdict: r.verdict_text(),
                error: r.outcome.as_ref().err().map(String::as_str),
                reports: r
                    .outcome
                    .as_ref()
                    .map(|o| {
                        o.reports
                            .iter()
                            .map(|rep| ReportLine {
                                variant: &rep.variant,
                                verdict: rep.verdict,
                                asserted: rep.asserted,
                                slope: rep.slope,
                                band: rep.band,
                                c_fit: rep.c_fit,
                                note: rep.note.as_deref(),
                            })
                            .collect()
                    })
                    .unwrap_or_default(),
            })
            .collect();
        let doc = serde_json::json!({
            "seed": self.seed,
            "exit_code": self.exit_code(),
            "cells": cells,
        });
        let mut s = serde_json::to_string_pretty(&doc).expect("summary serializes");
        s.push('\n');
        s
    }
}

fn run_cell(cell: &Cell, cfg: &HarnessConfig) -> Result<CheckOutcome, String> {
    let f = corpus_get(&cell.function).map_err(|e| e.to_string())?;
    match catch_unwind(AssertUnwindSafe(|| run_check(cell.check_id, &f, &cell.params, cfg))) {
        Ok(r) => r.map_err(|e| e.to_string()),
        Err(panic) => Err(panic
            .downcast_ref::<String>()
            .cloned()
            .or_else(|| panic.downcast_ref::<&str>().map(|s| s.to_string()))
            .unwrap_or_else(|| "internal error".into())),
    }
}

/// Runs every cell on a pool of `workers` threads. Results keep the cell
/// order, so the outcome does not depend on the worker count.
pub fn execute(cfg: &ExperimentConfig, workers: usize) -> RunSummary {
    let hc = cfg.harness_config();
    let cells = cfg.cells();
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(workers.max(1))
        .build()
        .expect("thread pool");
    let results = pool.install(|| {
        cells
            .into_par_iter()
            .map(|cell| {
                let outcome = run_cell(&cell, &hc);
                CellResult { cell, outcome }
            })
            .collect()
    });
    RunSummary {
        results,
        seed: cfg.seed,
    }
}

/// Writes the per-cell files and the summary into `dir`; returns the paths
/// written, in a fixed order.
pub fn write_outputs(
    cfg: &ExperimentConfig,
    summary: &RunSummary,
    dir: &Path,
) -> io::Result<Vec<PathBuf>> {
    fs::create_dir_all(dir)?;
    let mut written = Vec::new();
    let mut put = |name: String, body: &str| -> io::Result<()> {
        let path = dir.join(name);
        fs::write(&path, body)?;
        written.push(path);
        Ok(())
    };
    for r in &summary.results {
        let Ok(o) = &r.outcome else { continue };
        if cfg.emit.contains(&EmitFormat::Json) {
            put(format!("{}.json", r.cell.stem), &o.to_json())?;
        }
        for rep in &o.reports {
            let stem = format!("{}__{}", r.cell.stem, rep.variant);
            if cfg.emit.contains(&EmitFormat::Csv) {
                put(format!("{stem}.csv"), &rep.to_csv())?;
            }
            if cfg.emit.contains(&EmitFormat::Svg) {
                put(format!("{stem}.svg"), &render_loglog(rep))?;
            }
        }
    }
    put("summary.csv".into(), &summary.table_csv())?;
    put("summary.json".into(), &summary.to_json())?;
    Ok(written)
}

/// [`execute`] followed by [`write_outputs`] into `cfg.output_dir`.
pub fn run(cfg: &ExperimentConfig, workers: usize) -> io::Result<RunSummary> {
    let summary = execute(cfg, workers);
    write_outputs(cfg, &summary, &cfg.output_dir)?;
    Ok(summary)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cli::parse_config;

    fn config(functions: &str, check: &str) -> ExperimentConfig {
        parse_config(&format!(
            r#"{{"schema": 1, "functions": [{functions}], "emit": ["csv", "json", "svg"], "checks": [{check}]}}"#
        ))
        .unwrap()
    }

    const DIRECT: &str =
        r#"{"id": "direct", "params": {"k": 2, "r": 1, "p": 2, "n_range": {"lo": 8, "hi": 32, "step": 8}}}"#;

    #[test]
    fn polynomials_only_are_degenerate() {
        let cfg = config(r#""poly_cheb_1", "poly_cheb_2""#, DIRECT);
        let s = execute(&cfg, 1);
        assert_eq!(s.results.len(), 2);
        for r in &s.results {
            assert_eq!(r.verdict_text(), "DEGENERATE", "{}", r.cell.stem);
        }
        assert_eq!(s.exit_code(), EXIT_OK);
    }

    #[test]
    fn exit_codes() {
        // n = 8..32 is still pre-asymptotic for |x|^1.5, so the ratio drifts
        let cfg = config(r#""abs_pow_1.5", "poly_cheb_2""#, DIRECT);
        let mut s = execute(&cfg, 1);
        assert_eq!(s.results[0].verdict_text(), "FAIL");
        assert_eq!(s.exit_code(), EXIT_FAIL);

        s.results.remove(0);
        assert_eq!(s.exit_code(), EXIT_OK);

        let mut broken = s.results[0].clone();
        broken.outcome = Err("no convergence".into());
        s.results.push(broken);
        assert_eq!(s.exit_code(), EXIT_NUMERICAL);
        assert!(s.table_csv().contains("ERROR"));
        assert!(s.to_json().contains("\"error\": \"no convergence\""));
    }

    #[test]
    fn worker_count_does_not_change_output() {
        let cfg = config(r#""abs_pow_1.5", "exp", "poly_cheb_2""#, DIRECT);
        let a = tempfile::tempdir().unwrap();
        let b = tempfile::tempdir().unwrap();
        let fa = write_outputs(&cfg, &execute(&cfg, 1), a.path()).unwrap();
        let fb = write_outputs(&cfg, &execute(&cfg, 3), b.path()).unwrap();
        assert_eq!(fa.len(), fb.len());
        for (x, y) in fa.iter().zip(&fb) {
            assert_eq!(x.file_name(), y.file_name());
            assert_eq!(fs::read(x).unwrap(), fs::read(y).unwrap(), "{}", x.display());
        }
        assert!(fa.iter().any(|p| p.extension().is_some_and(|e| e == "svg")));
    }
}
