//! Hardy space of a nest system and the shift compressions of its graded pieces.

use wflow::gns::{canonical_state, gns};
use wflow::hardy::{build_hardy, compression_shift, hardy_checks};
use wflow::numsub::Tolerances;
use wflow::reflexivity::nest_example;

fn main() -> wflow::error::Result<()> {
    let (sys, _) = nest_example(&[1, 2], &[1, 0], &Tolerances::default())?;
    let g = gns(&sys, &canonical_state(&sys, None)?)?;
    let h = build_hardy(&g)?;
    println!(
        "dim H = {}, dim H+ = {}, grades {:?}",
        g.dim(),
        h.dim(),
        h.plus_grades()
    );
    println!(
        "dim M+ = {}, dim (M')+ = {}",
        h.mplus().dim(),
        h.mprimeplus().dim()
    );

    for v in sys.spectral_subspace(1).elements() {
        let s = compression_shift(&h, &v, 1)?;
        println!("S_v adjoint residual {:.1e}", s.adjoint_residual);
    }
    for c in hardy_checks(&h) {
        println!("{:?} {}", c.status, c.anchor);
    }
    Ok(())
}
