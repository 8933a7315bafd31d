//! GNS realization of full `M₃` under a non-tracial state, with its modular data.

use wflow::flow::WStarSystem;
use wflow::gns::{canonical_state, gns, verify_standard_identities};
use wflow::numsub::{hermitian_eigen, real_diag, Tolerances};

fn main() -> wflow::error::Result<()> {
    let tol = Tolerances::default();
    let sys = WStarSystem::full(vec![0, 1, 2], &tol)?;
    let state = canonical_state(&sys, Some(&real_diag(&[0.5, 0.3, 0.2])))?;
    let g = gns(&sys, &state)?;

    let (delta, _) = hermitian_eigen(&g.modular().delta);
    println!("dim H = {}", g.dim());
    println!("spectrum of Delta: {:.4?}", delta);
    println!("|Delta - I| = {:.4}", g.modular().delta_deviation());
    println!("|S - J Delta^1/2| = {:.2e}", g.modular().polar_residual());

    for c in verify_standard_identities(&g) {
        println!("{:?} {} ({:.1e})", c.status, c.anchor, c.residual);
    }
    Ok(())
}
