//! Reflexivity of block-diagonal algebras decided from their corners.

use wflow::numsub::Tolerances;
use wflow::reflexivity::{combine_reflexive_corners, corner_fixture, Sampling};

fn main() -> wflow::error::Result<()> {
    let tol = Tolerances::default();
    for seed in 0..6 {
        let (a, qs) = corner_fixture(seed, &tol)?;
        let v = combine_reflexive_corners(&a, &qs, &Sampling::with_seed(seed))?;
        let corners: Vec<String> = v
            .corners
            .iter()
            .map(|c| format!("{}/{}", c.input_dim, c.closure_dim))
            .collect();
        println!(
            "seed {seed}: d = {}, corners [{}], combined {:?}, direct {:?}, agree {}",
            a.ambient_dim(),
            corners.join(" "),
            v.verdict,
            v.direct.verdict,
            v.agrees
        );
    }
    Ok(())
}
