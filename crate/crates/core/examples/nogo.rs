//! Finite-dimensional obstructions on a few systems.

use wflow::flow::{random_system, WStarSystem};
use wflow::hardy::{corner_decomposition, min_positive_spectrum, nogo_report};
use wflow::numsub::Tolerances;

fn main() -> wflow::error::Result<()> {
    let tol = Tolerances::default();
    let mut systems = vec![
        ("full3".to_string(), WStarSystem::full(vec![0, 1, 2], &tol)?),
        ("trivial".to_string(), WStarSystem::full(vec![1, 1], &tol)?),
    ];
    for seed in 0..3 {
        systems.push((format!("random{seed}"), random_system(seed, 4, &tol)?));
    }
    for (name, sys) in &systems {
        println!("{name}: n0 = {:?}", min_positive_spectrum(sys));
        for c in nogo_report(sys) {
            println!("  {:?} {}: {}", c.status, c.anchor, c.details);
        }
        match corner_decomposition(sys) {
            Ok(c) => println!("  corners: {:?} after {} rounds", c.outcome, c.rounds),
            Err(e) => println!("  corners: {e}"),
        }
    }
    Ok(())
}
