//! The analytic part `M₊` on the Hardy space is reflexive: full `M₃` and a nest.

use wflow::flow::WStarSystem;
use wflow::numsub::Tolerances;
use wflow::reflexivity::{
    commutant_duality_check, isometry_commutation_check, nest_example, theorem5_verify, Sampling,
};

fn run(name: &str, sys: &WStarSystem) -> wflow::error::Result<()> {
    let run = theorem5_verify(sys, None, &Sampling::default())?;
    println!(
        "{name}: dim H+ = {}, dim M+ = {}, closure {}, {:?}, two-sided residual {:.1e}",
        run.hardy.dim(),
        run.report.input_dim,
        run.report.closure_dim,
        run.report.verdict,
        run.two_sided_residual
    );
    for c in commutant_duality_check(&run.hardy)? {
        println!("  {:?} {}: {}", c.status, c.anchor, c.details);
    }
    let c = isometry_commutation_check(&run.hardy, &run.closure)?;
    println!("  {:?} {}: {}", c.status, c.anchor, c.details);
    Ok(())
}

fn main() -> wflow::error::Result<()> {
    let tol = Tolerances::default();
    run("full3", &WStarSystem::full(vec![0, 1, 2], &tol)?)?;
    let (nest, expected) = nest_example(&[2, 1, 1], &[3, 2, 1], &tol)?;
    println!("nest with expected dim M+ = {expected}");
    run("nest", &nest)
}
