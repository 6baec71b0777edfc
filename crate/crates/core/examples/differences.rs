//! Finite differences: exactness on monomials and the domain gates.

use smoothlab::differences::{
    backward_diff, forward_diff, restricted_symmetric_diff, symmetric_diff, DiffQuery,
};

fn main() -> smoothlab::Result<()> {
    // Δ^k_h x^k = k! h^k at every x
    for k in 1..=8 {
        let h = 0.05;
        let mono = move |x: f64| x.powi(k as i32);
        let d = symmetric_diff(&mono, DiffQuery::new(0.3, h, k)?);
        let exact = (1..=k).product::<usize>() as f64 * h.powi(k as i32);
        println!("k = {k}: {d:.15e}  k!h^k = {exact:.15e}  rel err {:.1e}", (d / exact - 1.0).abs());
    }

    let f = |x: f64| x.abs().powf(1.5);
    let q = DiffQuery::new(0.95, 0.2, 2)?;
    println!("\nat x = 0.95, h = 0.2, k = 2 on |x|^1.5:");
    println!("  restricted symmetric {:.6e} (nodes leave [-1, 1])", restricted_symmetric_diff(&f, q));
    println!("  backward             {:.6e}", backward_diff(&f, q));
    println!("  forward              {:.6e}", forward_diff(&f, q));
    Ok(())
}
