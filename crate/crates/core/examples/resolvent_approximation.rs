//! Powers of a unitary from resolvents at `ε ωⁱ`, with achieved error against the bound.

use wflow::hardy::power_approximation;
use wflow::numsub::random::{rng, unitary};
use wflow::numsub::Tolerances;

fn main() -> wflow::error::Result<()> {
    let tol = Tolerances::default();
    let w = unitary(&mut rng(3), 5);
    println!(
        "{:>2} {:>5} {:>12} {:>12} {:>10}",
        "n", "eps", "achieved", "bound", "max |mu|"
    );
    for n in 1..=5 {
        for eps in [0.1, 0.5, 0.75] {
            let c = power_approximation(&w, n, eps, &tol)?;
            println!(
                "{n:>2} {eps:>5} {:>12.3e} {:>12.3e} {:>10.2}",
                c.achieved_error, c.bound, c.max_abs_mu
            );
        }
    }
    Ok(())
}
