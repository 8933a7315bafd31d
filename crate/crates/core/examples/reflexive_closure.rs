//! Sampled algLat for polynomials in a Jordan block, an upper-triangular algebra and
//! the algebra generated by a random pair.

use wflow::numsub::random::{complex_matrix, rng};
use wflow::numsub::{matrix_unit, CMatrix, Tolerances, ONE, ZERO};
use wflow::reflexivity::{reflexive_closure, OperatorAlgebraCarrier, Sampling};

fn jordan(d: usize) -> CMatrix {
    CMatrix::from_fn(d, d, |i, j| if j == i + 1 { ONE } else { ZERO })
}

fn report(name: &str, generators: &[CMatrix]) -> wflow::error::Result<()> {
    let a = OperatorAlgebraCarrier::generated_by(generators, &Tolerances::default())?;
    let (_, r) = reflexive_closure(&a, &Sampling::with_seed(1))?;
    println!(
        "{name:<12} dim {:>2} -> closure {:>2}  {:?}  ({} samples, {} witnesses)",
        r.input_dim, r.closure_dim, r.verdict, r.samples_used, r.witness_count
    );
    Ok(())
}

fn main() -> wflow::error::Result<()> {
    report("jordan4", &[jordan(4)])?;
    report("jordan2", &[jordan(2)])?;
    let ut: Vec<CMatrix> = (0..3)
        .flat_map(|i| (i..3).map(move |j| matrix_unit(3, i, j)))
        .collect();
    report("ut3", &ut)?;
    let mut r = rng(9);
    report(
        "random pair",
        &[complex_matrix(&mut r, 3, 3), complex_matrix(&mut r, 3, 3)],
    )?;
    Ok(())
}
