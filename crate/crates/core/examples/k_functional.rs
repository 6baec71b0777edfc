//! Upper bounds for K-functionals from polynomial competitors, compared with
//! the modulus they are equivalent to.

use smoothlab::corpus::corpus_get;
use smoothlab::kfunc::{k_functional_weighted_upper, k_new_upper_sweep, KQuery};
use smoothlab::moduli::new_modulus;
use smoothlab::numerics::{JacobiWeight, LpExponent};

fn main() -> smoothlab::Result<()> {
    let spec = corpus_get("abs_pow_2.5")?;
    let (k, r, p) = (2, 1, LpExponent::TWO);
    let f1 = spec.deriv(r).expect("derivative");
    let ts = [0.5, 0.25, 0.125, 0.0625];
    let ks = k_new_upper_sweep(&spec, &KQuery::new(k, r, ts[0], p), &ts)?;
    println!("{:>8} {:>14} {:>14} {:>8} {:>6}", "t", "modulus", "K upper", "ratio", "deg");
    for (t, est) in ts.iter().zip(&ks) {
        let w = new_modulus(&f1, k, r, *t, p)?;
        println!(
            "{t:>8} {w:>14.6e} {:>14.6e} {:>8.3} {:>6}",
            est.value,
            w / est.value,
            est.best_g.n - 1
        );
    }

    let f = spec.function();
    let q = KQuery::new(2, 0, 0.125, p).with_weight(JacobiWeight::new(0.5, 0.0)?);
    let est = k_functional_weighted_upper(&f, &q)?;
    println!(
        "\nweighted K at t = 1/8: {:.6e} = {:.6e} + t^2 * {:.6e}",
        est.value, est.first_term, est.penalty
    );
    Ok(())
}
