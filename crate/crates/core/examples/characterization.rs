//! Characterizations of `E_n ≍ n^{-α}`: through the modulus, and through the
//! growth of derivatives of near-best polynomials.

use smoothlab::corpus::corpus_get;
use smoothlab::harness::{run_check, CheckId, CheckParams, HarnessConfig};
use smoothlab::numerics::LpExponent;

fn main() -> smoothlab::Result<()> {
    let cfg = HarnessConfig::default();
    for (id, alpha, r) in [("abs_pow_1.5", 1.5, 0), ("abs_pow_2.5", 2.5, 1)] {
        let f = corpus_get(id)?;
        let q = CheckParams::new(2, r, LpExponent::INF)
            .alpha(alpha)
            .n_range(32, 128, 16)
            .t_grid(1.0 / 128.0, 1.0 / 32.0, 2);
        for check in [CheckId::Characterization, CheckId::PnGrowth] {
            let o = run_check(check, &f, &q, &cfg)?;
            println!("{check} on {id}: {}", o.verdict);
            for rep in &o.reports {
                println!("  {:<12} {:<10} slope {:+.4}", rep.variant, rep.verdict.to_string(), rep.slope.unwrap_or(f64::NAN));
            }
        }
    }
    Ok(())
}
