//! Lists the corpus and evaluates one member with its derivatives.
//!
//!     cargo run --example corpus_tour [function-id]

use smoothlab::corpus::{corpus_get, corpus_list};
use smoothlab::numerics::LpExponent;

fn main() -> smoothlab::Result<()> {
    let id = std::env::args().nth(1).unwrap_or_else(|| "abs_pow_1.5".into());
    println!("{} members: {}", corpus_list().len(), corpus_list().join(" "));

    let f = corpus_get(&id)?;
    println!("\n{id}: max_order {}, singular at {:?}, alpha_hint {:?}", f.max_order, f.singular_points, f.alpha_hint);
    for x in [-1.0, -0.5, 0.0, 0.25, 1.0] {
        let derivs: Vec<String> = (0..=f.max_order.min(3))
            .filter_map(|j| f.deriv(j).map(|d| format!("{:+.6e}", d.eval(x))))
            .collect();
        println!("  x = {x:+.2}  f, f', ... = {}", derivs.join("  "));
    }
    for p in [LpExponent::TWO, LpExponent::INF] {
        let member: Vec<usize> = (0..=3).filter(|&r| f.b_rp_member(r, p)).collect();
        println!("  in B^r_{p} for r in {member:?}");
    }
    Ok(())
}
