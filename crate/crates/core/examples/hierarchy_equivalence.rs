//! The modulus hierarchy and the modulus/K-functional equivalence. The
//! equivalence is judged by the spread of the ratio, not its trend.

use smoothlab::corpus::corpus_get;
use smoothlab::harness::{run_check, CheckId, CheckParams, HarnessConfig};
use smoothlab::numerics::LpExponent;

fn main() -> smoothlab::Result<()> {
    let cfg = HarnessConfig::default();

    let f = corpus_get("abs_pow_2.5")?;
    let q = CheckParams::new(2, 1, LpExponent::INF).t_grid(1.0 / 64.0, 0.5, 1);
    let o = run_check(CheckId::Hierarchy, &f, &q, &cfg)?;
    println!("hierarchy on {}: {}", f.id, o.verdict);
    for rep in &o.reports {
        println!("  {:<8} {} slope {:+.4}", rep.variant, rep.verdict, rep.slope.unwrap_or(f64::NAN));
    }

    let f = corpus_get("exp")?;
    let q = CheckParams::new(2, 1, LpExponent::TWO).t_grid(1.0 / 32.0, 1.0, 1);
    let o = run_check(CheckId::Equivalence, &f, &q, &cfg)?;
    println!("\nequivalence on {}: {}", f.id, o.verdict);
    for rep in &o.reports {
        println!("  {:<10} {} band {:.3} (limit {})", rep.variant, rep.verdict, rep.band.unwrap_or(f64::NAN), cfg.band_max);
        if let Some(note) = &rep.note {
            println!("    {note}");
        }
    }
    Ok(())
}
