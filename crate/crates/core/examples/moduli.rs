//! The four moduli side by side, and the order of the DT modulus recovered
//! from a log-log fit.

use smoothlab::corpus::corpus_get;
use smoothlab::moduli::{
    dt_modulus, main_part_modulus, new_modulus, weighted_dt_modulus, ModulusKind, ModulusQuery,
};
use smoothlab::numerics::{fit_loglog_slope, JacobiWeight, LpExponent};

fn main() -> smoothlab::Result<()> {
    let spec = corpus_get("abs_pow_1.5")?;
    let f = spec.function();
    let f1 = spec.deriv(1).expect("first derivative");
    let w = JacobiWeight::new(0.5, 0.0)?;
    let p = LpExponent::TWO;

    println!("{:>8} {:>14} {:>14} {:>14} {:>14}", "t", "dt k=2", "new k=1 r=1", "weighted k=2", "main part");
    for t in [0.25, 0.125, 0.0625, 0.03125] {
        println!(
            "{t:>8} {:>14.6e} {:>14.6e} {:>14.6e} {:>14.6e}",
            dt_modulus(&f, 2, t, p)?,
            new_modulus(&f1, 1, 1, t, p)?,
            weighted_dt_modulus(&f, 2, t, w, p)?,
            main_part_modulus(&f, 2, t, w, p)?,
        );
    }

    let ts: Vec<f64> = (3..=10).rev().map(|j| 2f64.powi(-j)).collect();
    let q = ModulusQuery::new(ModulusKind::Dt, 2, LpExponent::INF, ts[0]);
    let vals = q.sweep(&f, &ts)?;
    let fit = fit_loglog_slope(&ts, &vals)?;
    println!("\nsup-norm DT modulus of |x|^1.5 behaves like t^{:.4}", fit.slope);
    Ok(())
}
