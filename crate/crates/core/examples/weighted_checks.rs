//! The Jacobi-weighted checks: transfer of the modulus to one derivative,
//! the weighted Jackson estimate and the weighted inverse estimate.

use smoothlab::corpus::corpus_get;
use smoothlab::harness::{run_check, CheckId, CheckParams, HarnessConfig};
use smoothlab::numerics::{JacobiWeight, LpExponent};

fn main() -> smoothlab::Result<()> {
    let cfg = HarnessConfig::default();
    let f = corpus_get("abs_pow_1.5")?;
    let w = JacobiWeight::new(0.5, 0.0)?;
    let runs = [
        (CheckId::WeightedTransfer, CheckParams::new(3, 1, LpExponent::TWO).weight(w).t_grid(1.0 / 256.0, 1.0 / 16.0, 1)),
        (CheckId::WeightedJackson, CheckParams::new(3, 1, LpExponent::TWO).weight(w).n_range(16, 128, 16)),
        (
            CheckId::WeightedInverse,
            CheckParams::new(3, 1, LpExponent::TWO)
                .weight(w)
                .alpha(2.0)
                .big_n(1)
                .n_range(16, 128, 16)
                .t_grid(1.0 / 256.0, 1.0 / 16.0, 1),
        ),
    ];
    for (check, q) in runs {
        let o = run_check(check, &f, &q, &cfg)?;
        println!("{check} on {} with w = (1-x)^0.5: {}", f.id, o.verdict);
        for rep in &o.reports {
            println!(
                "  {:<18} {:<10} slope {:+.4}{}",
                rep.variant,
                rep.verdict.to_string(),
                rep.slope.unwrap_or(f64::NAN),
                if rep.asserted { "" } else { "  (informational)" }
            );
        }
    }
    Ok(())
}
