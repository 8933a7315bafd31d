//! Numeric substrate: dense complex matrices, Hilbert–Schmidt geometry, subspace
//! arithmetic and the tolerance policy every other module shares.
//!
//! Matrices are vectorized row-major (`vec(m)[i * cols + j] = m[(i, j)]`), so the
//! Hilbert–Schmidt inner product `tr(b* a)` is the ordinary inner product of
//! the vectorizations and one subspace machinery serves vectors and operators.

mod decomp;
pub mod random;
mod subspace;

pub use decomp::{
    hermitian_eigen, polar_partial_isometry, psd_function, psd_sqrt, singular_values, sorted_svd,
};
pub use subspace::{
    null_space, orthonormal_columns, orthonormalize, subspace_compare, Comparison,
    OperatorSubspace, Relation, Subspace,
};
pub(crate) use subspace::{null_space_abs, orthonormalize_scaled};

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub type C64 = Complex64;
pub type CMatrix = DMatrix<C64>;
pub type CVector = DVector<C64>;

pub const ZERO: C64 = C64::new(0.0, 0.0);
pub const ONE: C64 = C64::new(1.0, 0.0);
pub const I: C64 = C64::new(0.0, 1.0);

/// Tolerance policy. Rank decisions are always relative to the largest singular value.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Tolerances {
    /// Relative singular-value cutoff.
    pub rank_tol: f64,
    /// Projector-distance threshold for subspace equality and containment.
    pub subspace_tol: f64,
    /// Threshold for identity checks.
    pub residual_tol: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Tolerances {
            rank_tol: 1e-9,
            subspace_tol: 1e-8,
            residual_tol: 1e-8,
        }
    }
}

impl Tolerances {
    pub fn new(rank_tol: f64, subspace_tol: f64, residual_tol: f64) -> Result<Self> {
        let t = Tolerances {
            rank_tol,
            subspace_tol,
            residual_tol,
        };
        t.validate()?;
        Ok(t)
    }

    pub fn validate(&self) -> Result<()> {
        for (name, v) in [
            ("rank_tol", self.rank_tol),
            ("subspace_tol", self.subspace_tol),
            ("residual_tol", self.residual_tol),
        ] {
            if !(v > 0.0 && v < 1.0) {
                return Err(Error::input(format!("{name} must lie in (0, 1), got {v}")));
            }
        }
        Ok(())
    }

    pub fn with_residual_tol(mut self, residual_tol: f64) -> Result<Self> {
        self.residual_tol = residual_tol;
        self.validate()?;
        Ok(self)
    }
}

/// `trace(b* a)`.
pub fn hs_inner(a: &CMatrix, b: &CMatrix) -> Result<C64> {
    if a.shape() != b.shape() {
        return Err(Error::shape(format!(
            "hs_inner of {:?} and {:?}",
            a.shape(),
            b.shape()
        )));
    }
    Ok(a.iter().zip(b.iter()).map(|(x, y)| x * y.conj()).sum())
}

pub fn hs_norm(a: &CMatrix) -> f64 {
    a.iter().map(|x| x.norm_sqr()).sum::<f64>().sqrt()
}

/// Operator (spectral) norm.
pub fn op_norm(a: &CMatrix) -> f64 {
    if a.is_empty() {
        return 0.0;
    }
    singular_values(a)[0]
}

pub fn vectorize(m: &CMatrix) -> CVector {
    let (r, c) = m.shape();
    CVector::from_fn(r * c, |k, _| m[(k / c, k % c)])
}

pub fn unvectorize(v: &CVector, rows: usize, cols: usize) -> Result<CMatrix> {
    if v.len() != rows * cols {
        return Err(Error::shape(format!(
            "cannot reshape length {} into {rows}x{cols}",
            v.len()
        )));
    }
    Ok(CMatrix::from_fn(rows, cols, |i, j| v[i * cols + j]))
}

pub fn matrix_unit(d: usize, i: usize, j: usize) -> CMatrix {
    let mut m = CMatrix::zeros(d, d);
    m[(i, j)] = ONE;
    m
}

pub fn identity(d: usize) -> CMatrix {
    CMatrix::identity(d, d)
}

/// Entrywise complex conjugate (no transpose).
pub fn conj(m: &CMatrix) -> CMatrix {
    m.map(|x| x.conj())
}

pub fn is_finite(m: &CMatrix) -> bool {
    m.iter().all(|x| x.re.is_finite() && x.im.is_finite())
}

pub fn commutator(a: &CMatrix, b: &CMatrix) -> CMatrix {
    a * b - b * a
}

/// Block-diagonal embedding `a ⊕ b`.
pub fn block_diag(a: &CMatrix, b: &CMatrix) -> CMatrix {
    let (ra, ca) = a.shape();
    let (rb, cb) = b.shape();
    let mut m = CMatrix::zeros(ra + rb, ca + cb);
    m.view_mut((0, 0), (ra, ca)).copy_from(a);
    m.view_mut((ra, ca), (rb, cb)).copy_from(b);
    m
}

/// Real-valued matrix from row-major rows, for fixtures.
pub fn real_matrix(rows: &[&[f64]]) -> CMatrix {
    let r = rows.len();
    let c = rows.first().map_or(0, |row| row.len());
    CMatrix::from_fn(r, c, |i, j| C64::new(rows[i][j], 0.0))
}

/// Diagonal matrix with real entries.
pub fn real_diag(entries: &[f64]) -> CMatrix {
    let d = entries.len();
    CMatrix::from_fn(d, d, |i, j| {
        if i == j {
            C64::new(entries[i], 0.0)
        } else {
            ZERO
        }
    })
}

/// Unit-modulus complex number `e^{iθ}`.
pub fn unit(theta: f64) -> C64 {
    C64::from_polar(1.0, theta)
}

/// `z^k` for unimodular `z` and any integer `k` (negative powers conjugate).
pub fn unimodular_pow(z: C64, k: i64) -> C64 {
    if k >= 0 {
        z.powu(k as u32)
    } else {
        z.conj().powu((-k) as u32)
    }
}

/// Square `m` into `k`-th matrix power.
pub fn matrix_pow(m: &CMatrix, k: usize) -> CMatrix {
    let mut out = identity(m.nrows());
    for _ in 0..k {
        out = &out * m;
    }
    out
}

pub(crate) fn require_square(m: &CMatrix, what: &str) -> Result<usize> {
    if m.nrows() != m.ncols() {
        return Err(Error::shape(format!(
            "{what} must be square, got {}x{}",
            m.nrows(),
            m.ncols()
        )));
    }
    if m.nrows() == 0 {
        return Err(Error::shape(format!("{what} must be non-empty")));
    }
    Ok(m.nrows())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numsub::random::{complex_matrix, rng};

    #[test]
    fn hs_inner_trivial_values() {
        let i2 = identity(2);
        assert_eq!(hs_inner(&i2, &i2).unwrap(), C64::new(2.0, 0.0));
        let e12 = matrix_unit(2, 0, 1);
        let e21 = matrix_unit(2, 1, 0);
        assert_eq!(hs_inner(&e12, &e21).unwrap(), ZERO);
    }

    #[test]
    fn hs_inner_matches_elementwise_sum() {
        let mut r = rng(3);
        let a = complex_matrix(&mut r, 3, 3);
        let mut oracle = 0.0;
        for i in 0..3 {
            for j in 0..3 {
                oracle += a[(i, j)].re * a[(i, j)].re + a[(i, j)].im * a[(i, j)].im;
            }
        }
        let v = hs_inner(&a, &a).unwrap();
        assert!((v.re - oracle).abs() < 1e-12 && v.im.abs() < 1e-12);
    }

    #[test]
    fn hs_inner_is_conjugate_symmetric() {
        let mut r = rng(4);
        let a = complex_matrix(&mut r, 3, 2);
        let b = complex_matrix(&mut r, 3, 2);
        let ab = hs_inner(&a, &b).unwrap();
        let ba = hs_inner(&b, &a).unwrap();
        assert!((ab - ba.conj()).norm() < 1e-12);
        // matches trace(b* a)
        let tr = (b.adjoint() * &a).trace();
        assert!((ab - tr).norm() < 1e-12);
    }

    #[test]
    fn hs_inner_rejects_shape_mismatch() {
        assert!(matches!(
            hs_inner(&identity(2), &identity(3)),
            Err(Error::Shape(_))
        ));
    }

    #[test]
    fn vectorization_round_trips() {
        let mut r = rng(5);
        let a = complex_matrix(&mut r, 2, 3);
        let v = vectorize(&a);
        assert_eq!(v[1], a[(0, 1)]);
        assert_eq!(unvectorize(&v, 2, 3).unwrap(), a);
    }

    #[test]
    fn tolerances_validate() {
        assert!(Tolerances::new(1e-9, 1e-8, 1e-8).is_ok());
        assert!(Tolerances::new(0.0, 1e-8, 1e-8).is_err());
        assert!(Tolerances::new(1e-9, 1.5, 1e-8).is_err());
    }
}
