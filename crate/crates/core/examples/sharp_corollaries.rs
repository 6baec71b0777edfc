//! Sharp Marchaud and sharp Jackson inequalities for `1 < p < ∞`, with the
//! exponents `q = min(2, p)` and `s = max(p, 2)` read back from the reports.

use smoothlab::corpus::corpus_get;
use smoothlab::harness::{run_check, CheckId, CheckParams, HarnessConfig};
use smoothlab::numerics::LpExponent;

fn main() -> smoothlab::Result<()> {
    let cfg = HarnessConfig::default();
    let f = corpus_get("abs_pow_0.5")?;
    for p in [1.5, 3.0] {
        let p = LpExponent::new(p)?;
        let q = CheckParams::new(2, 0, p).t_grid(1.0 / 64.0, 1.0 / 8.0, 2);
        let o = run_check(CheckId::SharpMarchaud, &f, &q, &cfg)?;
        for rep in &o.reports {
            println!(
                "marchaud p={p} q={} {:<9} {} slope {:+.4}",
                rep.metadata["q"], rep.variant, rep.verdict, rep.slope.unwrap_or(f64::NAN)
            );
        }
        let q = CheckParams::new(2, 0, p).n_levels(7);
        let o = run_check(CheckId::SharpJackson, &f, &q, &cfg)?;
        for rep in &o.reports {
            println!(
                "jackson  p={p} s={} {:<18} {} slope {:+.4}",
                rep.metadata["s"], rep.variant, rep.verdict, rep.slope.unwrap_or(f64::NAN)
            );
        }
    }
    Ok(())
}
