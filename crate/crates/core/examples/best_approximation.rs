//! Best polynomial approximation in the three regimes: Remez for the sup
//! norm, projection for p = 2, discretized minimization otherwise.

use smoothlab::bestapprox::{best_uniform, best_weighted_l2, discretized_lp, en_sequence};
use smoothlab::corpus::corpus_get;
use smoothlab::numerics::{fit_loglog_slope, JacobiWeight, LpExponent};
use smoothlab::RealFunction;

fn main() -> smoothlab::Result<()> {
    let abs = RealFunction::new(f64::abs).with_singular_points(&[0.0]);
    let e2 = best_uniform(&abs, 2)?;
    println!("E_2(|x|) = {:.10} ({}, certified {})", e2.err, e2.method, e2.certified);

    for n in 3..=6 {
        let mono = RealFunction::new(move |x: f64| x.powi(n as i32));
        let a = best_uniform(&mono, n)?;
        println!("E_{n}(x^{n}) = {:.10e}  2^(1-n) = {:.10e}", a.err, 2f64.powi(1 - n as i32));
    }

    let cube = RealFunction::new(|x: f64| x * x * x);
    let l2 = best_weighted_l2(&cube, 3, JacobiWeight::UNIT)?;
    let lp = discretized_lp(&cube, 3, LpExponent::new(2.0)?, JacobiWeight::UNIT)?;
    let exact = 0.4 * (2.0f64 / 7.0).sqrt();
    println!("E_3(x^3)_2: projection {:.12}, minimization {:.12}, exact {exact:.12}", l2.err, lp.err);

    let f = corpus_get("abs_pow_1.5")?.function();
    let p3 = LpExponent::new(3.0)?;
    let a = discretized_lp(&f, 8, p3, JacobiWeight::new(0.5, 0.0)?)?;
    println!("E_8(|x|^1.5) in L_3 with weight (1-x)^0.5: {:.6e}", a.err);

    for alpha in [0.5, 1.5, 2.5] {
        let f = corpus_get(&format!("abs_pow_{alpha}"))?.function();
        let seq = en_sequence(&f, 8, 64, LpExponent::INF, JacobiWeight::UNIT)?;
        let ns: Vec<f64> = seq.iter().map(|(n, _)| *n as f64).collect();
        let es: Vec<f64> = seq.iter().map(|(_, e)| *e).collect();
        println!("|x|^{alpha}: E_n decays like n^{:.3}", fit_loglog_slope(&ns, &es)?.slope);
    }
    Ok(())
}
