#![allow(dead_code)]

use wflow::numsub::{
    identity, matrix_unit, null_space, orthonormalize, vectorize, CMatrix, OperatorSubspace,
    Subspace, Tolerances, ONE,
};
use wflow::reflexivity::OperatorAlgebraCarrier;

/// Nilpotent Jordan block with ones on the superdiagonal.
pub fn jordan(d: usize) -> CMatrix {
    let mut n = CMatrix::zeros(d, d);
    for i in 0..d.saturating_sub(1) {
        n[(i, i + 1)] = ONE;
    }
    n
}

pub fn upper_triangular_units(d: usize) -> Vec<CMatrix> {
    let mut out = Vec::new();
    for i in 0..d {
        for j in i..d {
            out.push(matrix_unit(d, i, j));
        }
    }
    out
}

pub fn carrier(generators: &[CMatrix]) -> OperatorAlgebraCarrier {
    OperatorAlgebraCarrier::generated_by(generators, &Tolerances::default()).unwrap()
}

/// Operators leaving every member of `chain` invariant, found by solving
/// `(I − P) b P = 0` for all `P` directly on the matrix-unit basis.
pub fn alg_lat_of_chain(chain: &[Subspace], d: usize) -> OperatorSubspace {
    let tol = Tolerances::default();
    let projectors: Vec<CMatrix> = chain.iter().map(|s| s.projector()).collect();
    let rows = projectors.len() * d * d;
    let mut map = CMatrix::zeros(rows.max(1), d * d);
    for j in 0..d {
        for k in 0..d {
            let e = matrix_unit(d, j, k);
            let col = j * d + k;
            for (t, p) in projectors.iter().enumerate() {
                let image = vectorize(&((identity(d) - p) * &e * p));
                for r in 0..d * d {
                    map[(t * d * d + r, col)] = image[r];
                }
            }
        }
    }
    let kernel = null_space(&map, 1e-10);
    let elements: Vec<CMatrix> = (0..kernel.ncols())
        .map(|c| CMatrix::from_fn(d, d, |j, k| kernel[(j * d + k, c)]))
        .collect();
    orthonormalize(&elements, (d, d), &tol).unwrap()
}
