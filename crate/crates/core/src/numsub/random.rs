//! Seeded random fixtures. Every random draw in the crate goes through a ChaCha stream.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use super::{polar_partial_isometry, CMatrix, CVector, Tolerances, C64};

pub type Rng64 = ChaCha8Rng;

pub fn rng(seed: u64) -> Rng64 {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Standard complex Gaussian: real and imaginary parts are N(0, 1/2).
pub fn complex_gaussian<R: Rng + ?Sized>(rng: &mut R) -> C64 {
    let re: f64 = rng.sample(StandardNormal);
    let im: f64 = rng.sample(StandardNormal);
    C64::new(re, im) * std::f64::consts::FRAC_1_SQRT_2
}

pub fn complex_matrix<R: Rng + ?Sized>(rng: &mut R, rows: usize, cols: usize) -> CMatrix {
    CMatrix::from_fn(rows, cols, |_, _| complex_gaussian(rng))
}

pub fn complex_vector<R: Rng + ?Sized>(rng: &mut R, n: usize) -> CVector {
    CVector::from_fn(n, |_, _| complex_gaussian(rng))
}

pub fn unit_vector<R: Rng + ?Sized>(rng: &mut R, n: usize) -> CVector {
    loop {
        let v = complex_vector(rng, n);
        let nv = v.norm();
        if nv > 1e-8 {
            return v / C64::new(nv, 0.0);
        }
    }
}

/// Haar-ish random unitary (polar part of a complex Gaussian matrix).
pub fn unitary<R: Rng + ?Sized>(rng: &mut R, n: usize) -> CMatrix {
    let g = complex_matrix(rng, n, n);
    let (w, _) = polar_partial_isometry(&g, &Tolerances::default()).expect("square");
    w
}

/// Random positive-definite density with unit trace.
pub fn density<R: Rng + ?Sized>(rng: &mut R, n: usize) -> CMatrix {
    let g = complex_matrix(rng, n, n);
    let mut rho = &g * g.adjoint() + CMatrix::identity(n, n) * C64::new(0.2, 0.0);
    let tr = rho.trace();
    rho /= tr;
    rho
}

/// Uniform point in the open unit disc of radius `< r_max`.
pub fn disc_point<R: Rng + ?Sized>(rng: &mut R, r_max: f64) -> C64 {
    let r: f64 = r_max * rng.random::<f64>().sqrt();
    let theta: f64 = rng.random::<f64>() * std::f64::consts::TAU;
    C64::from_polar(r, theta)
}
