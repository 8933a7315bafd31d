//! Arveson spectrum and spectral subspaces of a seeded random system.

use wflow::flow::random_system;
use wflow::numsub::{hs_norm, Tolerances};

fn main() -> wflow::error::Result<()> {
    let seed = std::env::args()
        .nth(1)
        .and_then(|s| s.parse().ok())
        .unwrap_or(4);
    let sys = random_system(seed, 5, &Tolerances::default())?;
    println!(
        "d = {}, weights {:?}",
        sys.ambient_dim(),
        sys.action().weights()
    );
    println!("dim M = {}", sys.algebra().dim());
    println!("sp(alpha) = {:?}", sys.arveson_spectrum());
    for (n, sub) in sys.grading() {
        println!("  dim M_{n} = {}", sub.dim());
    }

    let m = sys
        .algebra()
        .basis()
        .iter()
        .cloned()
        .reduce(|a, b| a + b)
        .unwrap();
    let e = sys.fixed_point_expectation(&m)?;
    println!("|m - E(m)| = {:.4}", hs_norm(&(&m - e)));
    let products = sys.graded_product_check();
    println!(
        "{} graded products, max residual {:.1e}",
        products.pairs_checked, products.max_residual
    );
    Ok(())
}
