//! Finite-dimensional algebras of matrices: generation, commutants, structure predicates.
//!
//! In finite dimension every operator topology agrees, so "the von Neumann algebra
//! generated by a set" is just the linear span of all words in the set.

use crate::error::{Error, Result};
use crate::numsub::{
    block_diag, commutator, hs_norm, identity, null_space_abs, op_norm, orthonormalize,
    unvectorize, vectorize, CMatrix, OperatorSubspace, Subspace, Tolerances,
};

/// A unital matrix algebra carried by an orthonormal Hilbert–Schmidt basis.
///
/// The non-selfadjoint algebras of analytic elements use the same carrier with
/// `star_closed == false`.
#[derive(Debug, Clone)]
pub struct StarAlgebra {
    d: usize,
    space: OperatorSubspace,
    unital: bool,
    star_closed: bool,
}

impl StarAlgebra {
    /// Wraps a subspace that must already be closed under multiplication; flags are measured.
    pub fn from_space(space: OperatorSubspace) -> Result<Self> {
        let (r, c) = space.shape();
        if r != c {
            return Err(Error::shape("algebra of non-square matrices"));
        }
        let tol = *space.tol();
        let basis = space.elements();
        let mut worst = 0.0f64;
        for a in &basis {
            for b in &basis {
                worst = worst.max(space.residual(&(a * b))?);
            }
        }
        if worst >= tol.residual_tol {
            return Err(Error::input(format!(
                "subspace is not closed under multiplication (residual {worst:.3e})"
            )));
        }
        let unital = r > 0 && space.residual(&identity(r))? < tol.residual_tol * (r as f64).sqrt();
        let mut star = 0.0f64;
        for a in &basis {
            star = star.max(space.residual(&a.adjoint())?);
        }
        Ok(StarAlgebra {
            d: r,
            space,
            unital,
            star_closed: star < tol.residual_tol,
        })
    }

    pub fn full(d: usize, tol: Tolerances) -> Self {
        StarAlgebra {
            d,
            space: OperatorSubspace::full(d, tol),
            unital: true,
            star_closed: true,
        }
    }

    pub fn scalars(d: usize, tol: Tolerances) -> Self {
        let space = orthonormalize(&[identity(d)], (d, d), &tol).expect("shape");
        StarAlgebra {
            d,
            space,
            unital: true,
            star_closed: true,
        }
    }

    pub fn diagonal(d: usize, tol: Tolerances) -> Self {
        let units: Vec<CMatrix> = (0..d)
            .map(|i| crate::numsub::matrix_unit(d, i, i))
            .collect();
        let space = orthonormalize(&units, (d, d), &tol).expect("shape");
        StarAlgebra {
            d,
            space,
            unital: true,
            star_closed: true,
        }
    }

    pub fn ambient_dim(&self) -> usize {
        self.d
    }

    pub fn dim(&self) -> usize {
        self.space.dim()
    }

    pub fn space(&self) -> &OperatorSubspace {
        &self.space
    }

    pub fn tol(&self) -> &Tolerances {
        self.space.tol()
    }

    pub fn unital(&self) -> bool {
        self.unital
    }

    pub fn star_closed(&self) -> bool {
        self.star_closed
    }

    pub fn basis(&self) -> Vec<CMatrix> {
        self.space.elements()
    }

    /// Residual of `m` against the algebra.
    pub fn residual(&self, m: &CMatrix) -> Result<f64> {
        self.space.residual(m)
    }

    pub fn contains(&self, m: &CMatrix) -> Result<bool> {
        let scale = hs_norm(m).max(1.0);
        Ok(self.residual(m)? < self.tol().residual_tol * scale)
    }
}

/// Smallest algebra containing `generators` (plus adjoints and unit when asked).
///
/// Iterates pairwise products of the current basis and re-orthonormalizes until the
/// dimension stabilizes; more than `2d` rounds means rank inflation and is an error.
pub fn generate(
    generators: &[CMatrix],
    include_adjoints: bool,
    include_unit: bool,
    tol: &Tolerances,
) -> Result<StarAlgebra> {
    let d = match generators.first() {
        Some(g) => g.nrows(),
        None if include_unit => {
            return Err(Error::input(
                "cannot infer dimension from an empty generator list",
            ))
        }
        None => return Err(Error::input("empty generator list")),
    };
    let mut seed: Vec<CMatrix> = Vec::new();
    for g in generators {
        if g.shape() != (d, d) {
            return Err(Error::shape(format!(
                "generator of shape {:?} among {d}x{d}",
                g.shape()
            )));
        }
        seed.push(g.clone());
        if include_adjoints {
            seed.push(g.adjoint());
        }
    }
    if include_unit {
        seed.push(identity(d));
    }
    let mut space = orthonormalize(&seed, (d, d), tol)?;
    let cap = 2 * d.max(1);
    for _ in 0..cap {
        let basis = space.elements();
        let mut words = basis.clone();
        for a in &basis {
            for b in &basis {
                words.push(a * b);
            }
        }
        let next = orthonormalize(&words, (d, d), tol)?;
        if next.dim() > d * d {
            return Err(Error::Internal("generated dimension exceeds d²".into()));
        }
        if next.dim() == space.dim() {
            return StarAlgebra::from_space(next);
        }
        space = next;
    }
    Err(Error::Internal(format!(
        "generation did not stabilize within {cap} rounds"
    )))
}

/// `{x : xa = ax for every basis element a}`, always containing the identity.
pub fn commutant(a: &StarAlgebra) -> Result<StarAlgebra> {
    let d = a.ambient_dim();
    let tol = *a.tol();
    commutant_of(&a.basis(), d, &tol)
}

/// Commutant of an arbitrary family of `d × d` matrices.
pub fn commutant_of(family: &[CMatrix], d: usize, tol: &Tolerances) -> Result<StarAlgebra> {
    let mut kernel = CMatrix::identity(d * d, d * d);
    for a in family {
        if kernel.ncols() <= 1 {
            break;
        }
        let mut k = CMatrix::zeros(d * d, kernel.ncols());
        for c in 0..kernel.ncols() {
            let x = unvectorize(&kernel.column(c).into_owned(), d, d)?;
            k.set_column(c, &vectorize(&commutator(a, &x)));
        }
        // ‖[a, x]‖ ≤ 2‖a‖ for unit x
        let scale = (2.0 * op_norm(a)).max(1.0);
        let null = null_space_abs(&k, tol.rank_tol * scale);
        kernel = &kernel * null;
    }
    let mut space = OperatorSubspace::from_space(d, d, Subspace::from_orthonormal(kernel, *tol))?;
    if space.residual(&identity(d))? > tol.residual_tol {
        space = space.sum(&orthonormalize(&[identity(d)], (d, d), tol)?)?;
    }
    StarAlgebra::from_space(space)
}

#[derive(Debug, Clone, PartialEq)]
pub struct BicommutantReport {
    pub equal: bool,
    pub distance: f64,
}

/// Double-commutant identity for star-closed unital algebras.
pub fn bicommutant_check(a: &StarAlgebra) -> Result<BicommutantReport> {
    if !a.star_closed() || !a.unital() {
        return Err(Error::precondition(
            "double commutant check needs a star-closed unital algebra",
        ));
    }
    let cc = commutant(&commutant(a)?)?;
    let cmp = cc.space().compare(a.space())?;
    Ok(BicommutantReport {
        equal: cmp.relation == crate::numsub::Relation::Equal,
        distance: cmp.distance,
    })
}

pub fn is_abelian(a: &StarAlgebra) -> bool {
    let basis = a.basis();
    let tol = a.tol().residual_tol;
    basis.iter().enumerate().all(|(i, x)| {
        basis[i + 1..]
            .iter()
            .all(|y| hs_norm(&commutator(x, y)) < tol)
    })
}

/// `A ∩ A'`.
pub fn center(a: &StarAlgebra) -> Result<StarAlgebra> {
    let c = commutant(a)?;
    StarAlgebra::from_space(a.space().intersection(c.space())?)
}

/// Block-diagonal embedding of `a` and `b` into dimension `d_a + d_b`.
pub fn direct_sum(a: &StarAlgebra, b: &StarAlgebra) -> Result<StarAlgebra> {
    let za = CMatrix::zeros(a.ambient_dim(), a.ambient_dim());
    let zb = CMatrix::zeros(b.ambient_dim(), b.ambient_dim());
    let mut pieces: Vec<CMatrix> = a.basis().iter().map(|x| block_diag(x, &zb)).collect();
    pieces.extend(b.basis().iter().map(|y| block_diag(&za, y)));
    let d = a.ambient_dim() + b.ambient_dim();
    StarAlgebra::from_space(orthonormalize(&pieces, (d, d), a.tol())?)
}
