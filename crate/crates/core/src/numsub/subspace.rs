use serde::Serialize;

use super::{hs_norm, sorted_svd, unvectorize, vectorize, CMatrix, CVector, Tolerances, C64};
use crate::error::{Error, Result};

/// Orthonormal basis (as columns) of the column span of `mat`.
///
/// A column direction survives when its singular value is at least `rank_tol × σ_max`.
/// `scale` raises the reference above `σ_max` when the caller knows the natural size of
/// the inputs (pure rounding noise then stays rank zero); pass `0.0` for none.
pub fn orthonormal_columns(mat: &CMatrix, rank_tol: f64, scale: f64) -> CMatrix {
    let n = mat.nrows();
    if mat.ncols() == 0 || n == 0 {
        return CMatrix::zeros(n, 0);
    }
    let (u, s, _) = sorted_svd(mat);
    let reference = s.iter().cloned().fold(scale, f64::max);
    if reference <= 0.0 {
        return CMatrix::zeros(n, 0);
    }
    let rank = s.iter().filter(|&&x| x > rank_tol * reference).count();
    u.columns(0, rank).into_owned()
}

/// Orthonormal basis (as columns) of the null space of `mat`.
pub fn null_space(mat: &CMatrix, rank_tol: f64) -> CMatrix {
    let (r, c) = mat.shape();
    if c == 0 {
        return CMatrix::zeros(0, 0);
    }
    if r == 0 {
        return CMatrix::identity(c, c);
    }
    // nalgebra returns only min(r, c) right singular vectors; pad so all c appear.
    let padded = if r < c {
        let mut p = CMatrix::zeros(c, c);
        p.view_mut((0, 0), (r, c)).copy_from(mat);
        p
    } else {
        mat.clone()
    };
    let (_, s, vt) = sorted_svd(&padded);
    let smax = s.iter().cloned().fold(0.0, f64::max);
    let keep: Vec<usize> = (0..s.len())
        .filter(|&k| smax == 0.0 || s[k] <= rank_tol * smax)
        .collect();
    CMatrix::from_fn(c, keep.len(), |i, j| vt[(keep[j], i)].conj())
}

/// A linear subspace of `C^n` carried by an orthonormal basis.
#[derive(Debug, Clone)]
pub struct Subspace {
    ambient_dim: usize,
    basis: CMatrix,
    tol: Tolerances,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Relation {
    Equal,
    FirstInSecond,
    SecondInFirst,
    Incomparable,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Comparison {
    pub relation: Relation,
    /// Hilbert–Schmidt norm of the difference of the orthogonal projectors.
    pub distance: f64,
    /// How far the first subspace sticks out of the second.
    pub first_in_second: f64,
    pub second_in_first: f64,
}

impl Subspace {
    pub fn zero(ambient_dim: usize, tol: Tolerances) -> Self {
        Subspace {
            ambient_dim,
            basis: CMatrix::zeros(ambient_dim, 0),
            tol,
        }
    }

    pub fn full(ambient_dim: usize, tol: Tolerances) -> Self {
        Subspace {
            ambient_dim,
            basis: CMatrix::identity(ambient_dim, ambient_dim),
            tol,
        }
    }

    /// Span of the columns of `mat`.
    pub fn from_columns(mat: &CMatrix, tol: Tolerances) -> Self {
        Subspace {
            ambient_dim: mat.nrows(),
            basis: orthonormal_columns(mat, tol.rank_tol, 0.0),
            tol,
        }
    }

    /// Span of the columns of `mat`, with rank measured against `scale` as well as `σ_max`.
    pub fn from_columns_scaled(mat: &CMatrix, tol: Tolerances, scale: f64) -> Self {
        Subspace {
            ambient_dim: mat.nrows(),
            basis: orthonormal_columns(mat, tol.rank_tol, scale),
            tol,
        }
    }

    pub fn span(vectors: &[CVector], ambient_dim: usize, tol: Tolerances) -> Result<Self> {
        for v in vectors {
            if v.len() != ambient_dim {
                return Err(Error::shape(format!(
                    "vector of length {} in ambient dimension {ambient_dim}",
                    v.len()
                )));
            }
        }
        let mat = CMatrix::from_fn(ambient_dim, vectors.len(), |i, j| vectors[j][i]);
        Ok(Self::from_columns(&mat, tol))
    }

    /// Trusts that `basis` already has orthonormal columns.
    pub fn from_orthonormal(basis: CMatrix, tol: Tolerances) -> Self {
        Subspace {
            ambient_dim: basis.nrows(),
            basis,
            tol,
        }
    }

    pub fn ambient_dim(&self) -> usize {
        self.ambient_dim
    }

    pub fn dim(&self) -> usize {
        self.basis.ncols()
    }

    pub fn basis(&self) -> &CMatrix {
        &self.basis
    }

    pub fn tol(&self) -> &Tolerances {
        &self.tol
    }

    pub fn vector(&self, k: usize) -> CVector {
        self.basis.column(k).into_owned()
    }

    pub fn projector(&self) -> CMatrix {
        &self.basis * self.basis.adjoint()
    }

    pub fn project(&self, v: &CVector) -> CVector {
        &self.basis * (self.basis.adjoint() * v)
    }

    /// `‖v − P v‖`.
    pub fn residual(&self, v: &CVector) -> f64 {
        (v - self.project(v)).norm()
    }

    /// Largest principal-angle sine of `self` against `other`: `‖(I − P_other) Q_self‖`.
    pub fn containment_residual(&self, other: &Subspace) -> Result<f64> {
        self.check_ambient(other)?;
        if self.dim() == 0 {
            return Ok(0.0);
        }
        let outside = &self.basis - other.basis() * (other.basis().adjoint() * &self.basis);
        Ok(super::op_norm(&outside))
    }

    pub fn distance(&self, other: &Subspace) -> Result<f64> {
        self.check_ambient(other)?;
        // ‖P1 − P2‖² = ‖(I − P2)Q1‖² + ‖(I − P1)Q2‖², free of cancellation
        let a = hs_norm(&(&self.basis - other.basis() * (other.basis().adjoint() * &self.basis)));
        let b = hs_norm(&(other.basis() - &self.basis * (self.basis.adjoint() * other.basis())));
        Ok((a * a + b * b).sqrt())
    }

    pub fn contains(&self, other: &Subspace) -> Result<bool> {
        Ok(other.containment_residual(self)? < self.tol.subspace_tol)
    }

    pub fn sum(&self, other: &Subspace) -> Result<Subspace> {
        self.check_ambient(other)?;
        let mut cat = CMatrix::zeros(self.ambient_dim, self.dim() + other.dim());
        cat.columns_mut(0, self.dim()).copy_from(&self.basis);
        cat.columns_mut(self.dim(), other.dim())
            .copy_from(other.basis());
        Ok(Subspace::from_columns(&cat, self.tol))
    }

    pub fn intersection(&self, other: &Subspace) -> Result<Subspace> {
        self.check_ambient(other)?;
        if self.dim() == 0 || other.dim() == 0 {
            return Ok(Subspace::zero(self.ambient_dim, self.tol));
        }
        // coefficients c with (I − P_other) Q c = 0
        let outside = &self.basis - other.basis() * (other.basis().adjoint() * &self.basis);
        let coeffs = null_space_abs(&outside, self.tol.subspace_tol);
        Ok(Subspace::from_orthonormal(&self.basis * coeffs, self.tol))
    }

    pub fn orthogonal_complement(&self) -> Subspace {
        let n = self.ambient_dim;
        if self.dim() == 0 {
            return Subspace::full(n, self.tol);
        }
        let (vals, vecs) = super::hermitian_eigen(&self.projector());
        let keep: Vec<usize> = (0..n).filter(|&k| vals[k] < 0.5).collect();
        let basis = CMatrix::from_fn(n, keep.len(), |i, j| vecs[(i, keep[j])]);
        Subspace::from_orthonormal(basis, self.tol)
    }

    fn check_ambient(&self, other: &Subspace) -> Result<()> {
        if self.ambient_dim != other.ambient_dim {
            return Err(Error::shape(format!(
                "ambient dimensions {} and {} differ",
                self.ambient_dim, other.ambient_dim
            )));
        }
        Ok(())
    }
}

/// Null space of a matrix whose columns are (nearly) unit vectors: a direction is null when
/// its singular value is below the absolute threshold `tol`.
pub(crate) fn null_space_abs(mat: &CMatrix, tol: f64) -> CMatrix {
    let (r, c) = mat.shape();
    let padded = if r < c {
        let mut p = CMatrix::zeros(c, c);
        p.view_mut((0, 0), (r, c)).copy_from(mat);
        p
    } else {
        mat.clone()
    };
    let (_, s, vt) = sorted_svd(&padded);
    let keep: Vec<usize> = (0..s.len()).filter(|&k| s[k] <= tol).collect();
    CMatrix::from_fn(c, keep.len(), |i, j| vt[(keep[j], i)].conj())
}

pub fn subspace_compare(s1: &Subspace, s2: &Subspace) -> Result<Comparison> {
    let first_in_second = s1.containment_residual(s2)?;
    let second_in_first = s2.containment_residual(s1)?;
    let distance = s1.distance(s2)?;
    let tol = s1.tol.subspace_tol;
    let a = first_in_second < tol;
    let b = second_in_first < tol;
    let relation = match (a, b) {
        (true, true) if s1.dim() == s2.dim() => Relation::Equal,
        (true, _) if s1.dim() <= s2.dim() => Relation::FirstInSecond,
        (_, true) if s2.dim() <= s1.dim() => Relation::SecondInFirst,
        _ => Relation::Incomparable,
    };
    Ok(Comparison {
        relation,
        distance,
        first_in_second,
        second_in_first,
    })
}

/// A linear space of `rows × cols` matrices with a Hilbert–Schmidt orthonormal basis.
#[derive(Debug, Clone)]
pub struct OperatorSubspace {
    rows: usize,
    cols: usize,
    space: Subspace,
}

impl OperatorSubspace {
    pub fn from_space(rows: usize, cols: usize, space: Subspace) -> Result<Self> {
        if space.ambient_dim() != rows * cols {
            return Err(Error::shape(format!(
                "subspace of C^{} cannot carry {rows}x{cols} matrices",
                space.ambient_dim()
            )));
        }
        Ok(OperatorSubspace { rows, cols, space })
    }

    pub fn zero(rows: usize, cols: usize, tol: Tolerances) -> Self {
        OperatorSubspace {
            rows,
            cols,
            space: Subspace::zero(rows * cols, tol),
        }
    }

    pub fn full(d: usize, tol: Tolerances) -> Self {
        OperatorSubspace {
            rows: d,
            cols: d,
            space: Subspace::full(d * d, tol),
        }
    }

    pub fn shape(&self) -> (usize, usize) {
        (self.rows, self.cols)
    }

    pub fn dim(&self) -> usize {
        self.space.dim()
    }

    pub fn space(&self) -> &Subspace {
        &self.space
    }

    pub fn tol(&self) -> &Tolerances {
        self.space.tol()
    }

    pub fn element(&self, k: usize) -> CMatrix {
        unvectorize(&self.space.vector(k), self.rows, self.cols).expect("shape fixed")
    }

    pub fn elements(&self) -> Vec<CMatrix> {
        (0..self.dim()).map(|k| self.element(k)).collect()
    }

    /// Hilbert–Schmidt orthogonal projection of `m` onto the space.
    pub fn project(&self, m: &CMatrix) -> Result<CMatrix> {
        self.check_shape(m)?;
        unvectorize(&self.space.project(&vectorize(m)), self.rows, self.cols)
    }

    /// `‖m − P m‖_HS`.
    pub fn residual(&self, m: &CMatrix) -> Result<f64> {
        self.check_shape(m)?;
        Ok(self.space.residual(&vectorize(m)))
    }

    /// Coordinates of `m` in the orthonormal basis (`⟨m, b_k⟩_HS`).
    pub fn coordinates(&self, m: &CMatrix) -> Result<CVector> {
        self.check_shape(m)?;
        Ok(self.space.basis().adjoint() * vectorize(m))
    }

    pub fn combine(&self, coeffs: &[C64]) -> CMatrix {
        let v = self.space.basis() * CVector::from_column_slice(coeffs);
        unvectorize(&v, self.rows, self.cols).expect("shape fixed")
    }

    pub fn compare(&self, other: &OperatorSubspace) -> Result<Comparison> {
        subspace_compare(&self.space, &other.space)
    }

    pub fn sum(&self, other: &OperatorSubspace) -> Result<OperatorSubspace> {
        Ok(OperatorSubspace {
            rows: self.rows,
            cols: self.cols,
            space: self.space.sum(&other.space)?,
        })
    }

    pub fn intersection(&self, other: &OperatorSubspace) -> Result<OperatorSubspace> {
        Ok(OperatorSubspace {
            rows: self.rows,
            cols: self.cols,
            space: self.space.intersection(&other.space)?,
        })
    }

    pub fn map(&self, f: impl Fn(&CMatrix) -> CMatrix) -> Vec<CMatrix> {
        self.elements().iter().map(f).collect()
    }

    fn check_shape(&self, m: &CMatrix) -> Result<()> {
        if m.shape() != (self.rows, self.cols) {
            return Err(Error::shape(format!(
                "matrix {:?} against operator space of {}x{}",
                m.shape(),
                self.rows,
                self.cols
            )));
        }
        Ok(())
    }
}

/// Orthonormal Hilbert–Schmidt basis for the span of `matrices`.
///
/// An empty list yields the zero subspace of `rows × cols` matrices taken from `shape`.
pub fn orthonormalize(
    matrices: &[CMatrix],
    shape: (usize, usize),
    tol: &Tolerances,
) -> Result<OperatorSubspace> {
    let (rows, cols) = shape;
    for m in matrices {
        if m.shape() != shape {
            return Err(Error::shape(format!(
                "matrix {:?} in a list of {rows}x{cols}",
                m.shape()
            )));
        }
    }
    let stacked = CMatrix::from_fn(rows * cols, matrices.len(), |k, j| {
        matrices[j][(k / cols, k % cols)]
    });
    OperatorSubspace::from_space(rows, cols, Subspace::from_columns(&stacked, *tol))
}

/// Like [`orthonormalize`], with the rank reference raised to `scale`.
pub(crate) fn orthonormalize_scaled(
    matrices: &[CMatrix],
    shape: (usize, usize),
    tol: &Tolerances,
    scale: f64,
) -> Result<OperatorSubspace> {
    let (rows, cols) = shape;
    let stacked = CMatrix::from_fn(rows * cols, matrices.len(), |k, j| {
        matrices[j][(k / cols, k % cols)]
    });
    OperatorSubspace::from_space(
        rows,
        cols,
        Subspace::from_columns_scaled(&stacked, *tol, scale),
    )
}
