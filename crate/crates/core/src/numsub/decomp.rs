use nalgebra::DVector;

use super::{require_square, CMatrix, Tolerances, C64};
use crate::error::Result;

fn to_faer(a: &CMatrix) -> faer::Mat<C64> {
    faer::Mat::from_fn(a.nrows(), a.ncols(), |i, j| a[(i, j)])
}

fn from_faer(m: faer::MatRef<'_, C64>) -> CMatrix {
    CMatrix::from_fn(m.nrows(), m.ncols(), |i, j| m[(i, j)])
}

/// Thin SVD with singular values in descending order: `(u, sigma, v_adjoint)`.
///
/// `u` is `rows × min`, `v_adjoint` is `min × cols`.
pub fn sorted_svd(a: &CMatrix) -> (CMatrix, DVector<f64>, CMatrix) {
    let (r, c) = a.shape();
    let k = r.min(c);
    if k == 0 {
        return (
            CMatrix::zeros(r, 0),
            DVector::zeros(0),
            CMatrix::zeros(0, c),
        );
    }
    let svd = to_faer(a).thin_svd().expect("svd converges");
    let s = svd.S().column_vector();
    let sigma = DVector::from_fn(k, |i, _| s[i].re);
    (from_faer(svd.U()), sigma, from_faer(svd.V()).adjoint())
}

/// Singular values in descending order.
pub fn singular_values(a: &CMatrix) -> Vec<f64> {
    if a.is_empty() {
        return Vec::new();
    }
    to_faer(a).singular_values().expect("svd converges")
}

/// Eigen-decomposition of a Hermitian matrix, eigenvalues ascending.
pub fn hermitian_eigen(h: &CMatrix) -> (Vec<f64>, CMatrix) {
    let n = h.nrows();
    if n == 0 {
        return (Vec::new(), CMatrix::zeros(0, 0));
    }
    let sym = (h + h.adjoint()) * C64::new(0.5, 0.0);
    let eig = to_faer(&sym)
        .self_adjoint_eigen(faer::Side::Lower)
        .expect("eigensolver converges");
    let s = eig.S().column_vector();
    let vals = (0..n).map(|i| s[i].re).collect();
    (vals, from_faer(eig.U()))
}

/// Apply a real function to the spectrum of a Hermitian matrix.
pub fn psd_function(h: &CMatrix, f: impl Fn(f64) -> f64) -> CMatrix {
    let (vals, vecs) = hermitian_eigen(h);
    let n = vals.len();
    let scaled = CMatrix::from_fn(n, n, |i, j| vecs[(i, j)] * f(vals[j]));
    scaled * vecs.adjoint()
}

/// Positive square root of a positive semidefinite matrix (negative rounding noise clamped).
pub fn psd_sqrt(h: &CMatrix) -> CMatrix {
    psd_function(h, |x| x.max(0.0).sqrt())
}

/// Polar decomposition `a = w·|a|` with `w` the partial isometry whose initial space is
/// the range of `|a|`. Singular values below `rank_tol × max` are treated as zero.
pub fn polar_partial_isometry(a: &CMatrix, tol: &Tolerances) -> Result<(CMatrix, CMatrix)> {
    let n = require_square(a, "polar decomposition input")?;
    let (u, s, vt) = sorted_svd(a);
    let smax = s.iter().cloned().fold(0.0, f64::max);
    let mut w = CMatrix::zeros(n, n);
    let mut pos = CMatrix::zeros(n, n);
    for k in 0..s.len() {
        let col_u = u.column(k);
        let row_v = vt.row(k);
        // |a| = V Σ V*, built from all components
        pos += row_v.adjoint() * row_v * C64::new(s[k], 0.0);
        if smax > 0.0 && s[k] > tol.rank_tol * smax {
            w += col_u * row_v;
        }
    }
    Ok((w, pos))
}
