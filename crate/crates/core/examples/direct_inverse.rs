//! The direct estimate `E_n ≤ C n^{-r} ω(f^{(r)}, 1/n)` and its inverse
//! counterpart, on a function whose derivative is unbounded.

use smoothlab::corpus::corpus_get;
use smoothlab::harness::{run_check, CheckId, CheckOutcome, CheckParams, HarnessConfig};
use smoothlab::numerics::LpExponent;

fn show(o: &CheckOutcome) {
    println!("{} on {}: {}", o.check_id, o.function, o.verdict);
    for rep in &o.reports {
        println!("  {:<12} {:<10} slope {:+.4}", rep.variant, rep.verdict.to_string(), rep.slope.unwrap_or(f64::NAN));
        for row in &rep.rows {
            println!("    {:>10.4e}  lhs {:.4e}  rhs {:.4e}", row.scale, row.lhs, row.rhs);
        }
    }
}

fn main() -> smoothlab::Result<()> {
    let cfg = HarnessConfig::default();
    let f = corpus_get("one_minus_x_pow_0.5")?;
    let q = CheckParams::new(2, 1, LpExponent::TWO).n_range(16, 128, 16);
    show(&run_check(CheckId::Direct, &f, &q, &cfg)?);

    let f = corpus_get("abs_pow_1.5")?;
    let q = CheckParams::new(2, 1, LpExponent::TWO)
        .t_grid(1.0 / 128.0, 1.0 / 16.0, 1)
        .n_max(128);
    show(&run_check(CheckId::InverseSum, &f, &q, &cfg)?);
    Ok(())
}
