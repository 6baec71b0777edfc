//! Batch runner behind the `smoothlab` binary.

mod config;
mod run;
mod svg;

pub use config::{parse_config, Cell, CheckEntry, ConfigError, EmitFormat, ExperimentConfig, SCHEMA_VERSION};
pub use run::{
    execute, run, workers_from_env, write_outputs, CellResult, RunSummary, EXIT_CONFIG, EXIT_FAIL,
    EXIT_NUMERICAL, EXIT_OK, WORKERS_ENV,
};
pub use svg::render_loglog;

use crate::bestapprox::en_approximants_at;
use crate::corpus::{corpus_get, corpus_list};
use crate::error::{Error, Result};
use crate::moduli::{ModulusKind, ModulusQuery};
use crate::numerics::{JacobiWeight, LpExponent};

/// Name under which the shipped suite is addressed on the command line.
pub const PAPER_SUITE: &str = "paper-suite";

const PAPER_SUITE_JSON: &str = include_str!("paper_suite.json");

/// Text of the shipped suite configuration.
pub fn paper_suite_text() -> &'static str {
    PAPER_SUITE_JSON
}

pub fn paper_suite() -> ExperimentConfig {
    parse_config(PAPER_SUITE_JSON).expect("shipped suite is valid")
}

fn g17(v: f64) -> String {
    format!("{v:.16e}")
}

/// Tab-separated `(t, value)` rows of one modulus. For [`ModulusKind::New`]
/// the modulus is taken of `f^{(r)}`.
pub fn modulus_eval(
    function: &str,
    kind: ModulusKind,
    k: usize,
    r: usize,
    p: LpExponent,
    w: JacobiWeight,
    ts: &[f64],
) -> Result<String> {
    let spec = corpus_get(function)?;
    let f = if kind == ModulusKind::New {
        spec.deriv(r).ok_or_else(|| {
            Error::InvalidArgument(format!("{function} lacks derivative {r}"))
        })?
    } else {
        spec.function()
    };
    let mut out = String::from("t\tvalue\n");
    for &t in ts {
        let v = ModulusQuery::new(kind, k, p, t).with_r(r).with_weight(w).eval(&f)?;
        out.push_str(&format!("{}\t{}\n", g17(t), g17(v)));
    }
    Ok(out)
}

/// Tab-separated `(n, E_n, method, certified)` rows.
pub fn bestapprox_table(
    function: &str,
    ns: &[usize],
    p: LpExponent,
    w: JacobiWeight,
) -> Result<String> {
    let f = corpus_get(function)?.function();
    let mut ns = ns.to_vec();
    ns.sort_unstable();
    ns.dedup();
    let approx = en_approximants_at(&f, &ns, p, w)?;
    let mut out = String::from("n\tE_n\tmethod\tcertified\n");
    for a in approx {
        out.push_str(&format!("{}\t{}\t{}\t{}\n", a.n, g17(a.err), a.method, a.certified));
    }
    Ok(out)
}

/// Tab-separated listing of the corpus.
pub fn corpus_table() -> String {
    let mut out = String::from("id\tmax_order\tsingular_points\talpha_hint\n");
    for id in corpus_list() {
        let f = corpus_get(&id).expect("listed ids resolve");
        let sing: Vec<String> = f.singular_points.iter().map(|x| x.to_string()).collect();
        out.push_str(&format!(
            "{}\t{}\t{}\t{}\n",
            f.id,
            f.max_order,
            if sing.is_empty() { "-".into() } else { sing.join(",") },
            f.alpha_hint.map_or("-".into(), |a| a.to_string())
        ));
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn modulus_rows() {
        let inf = LpExponent::INF;
        let out = modulus_eval("poly_cheb_2", ModulusKind::Dt, 3, 0, inf, JacobiWeight::UNIT, &[0.1]).unwrap();
        let line = out.lines().nth(1).unwrap();
        let v: f64 = line.split('\t').nth(1).unwrap().parse().unwrap();
        assert!(v.abs() < 1e-12, "{line}");

        let new = modulus_eval("abs_pow_1.5", ModulusKind::New, 2, 0, inf, JacobiWeight::UNIT, &[0.1]).unwrap();
        let dt = modulus_eval("abs_pow_1.5", ModulusKind::Dt, 2, 0, inf, JacobiWeight::UNIT, &[0.1]).unwrap();
        assert_eq!(new, dt);
    }

    #[test]
    fn corpus_listing_covers_every_member() {
        let t = corpus_table();
        assert_eq!(t.lines().count(), corpus_list().len() + 1);
    }

    #[test]
    fn shipped_suite_parses() {
        let cfg = paper_suite();
        assert!(!cfg.cells().is_empty());
    }
}
