//! Standard form of a circle-invariant faithful state.
//!
//! `H` is the algebra itself with `⟨a, b⟩ = φ(b*a)`. A Hilbert–Schmidt orthonormal basis
//! `b_i` of `M`, taken grade by grade, has Gram matrix `G_ij = φ(b_i* b_j)`. With
//! `R = G^{1/2}`, the vector `aξ₀` has coordinates `R·c(a)` where `c_i(a) = ⟨a, b_i⟩_HS`,
//! and every operator on `H` becomes an ordinary matrix. `φ` vanishes off `M₀`, so `G`
//! and `R` are block diagonal over the grading and each coordinate carries one weight.

mod identities;
mod modular;

pub use identities::verify_standard_identities;
pub use modular::{ConjLinear, ModularData};

use std::f64::consts::TAU;

use crate::algebra::StarAlgebra;
use crate::error::{Error, Result};
use crate::flow::WStarSystem;
use crate::numsub::{
    conj, hermitian_eigen, hs_inner, hs_norm, identity, orthonormalize, polar_partial_isometry,
    psd_function, unimodular_pow, unit, vectorize, CMatrix, CVector, OperatorSubspace, Subspace,
    Tolerances, C64, ZERO,
};

/// A positive linear functional on `M`, stored as its Riesz vector: `φ(m) = ⟨m, riesz⟩_HS`.
#[derive(Debug, Clone)]
pub struct State {
    riesz: CMatrix,
    faithful: bool,
    min_gram_eigenvalue: f64,
}

impl State {
    pub fn eval(&self, m: &CMatrix) -> C64 {
        hs_inner(m, &self.riesz).expect("state operand shape")
    }

    pub fn riesz(&self) -> &CMatrix {
        &self.riesz
    }

    pub fn faithful(&self) -> bool {
        self.faithful
    }

    /// Smallest eigenvalue of `φ(b_i* b_j)` over an orthonormal basis of `M`.
    pub fn min_gram_eigenvalue(&self) -> f64 {
        self.min_gram_eigenvalue
    }
}

fn gram(basis: &[CMatrix], phi: &CMatrix) -> CMatrix {
    let k = basis.len();
    CMatrix::from_fn(k, k, |i, j| {
        hs_inner(&(basis[i].adjoint() * &basis[j]), phi).expect("shape")
    })
}

fn min_eigenvalue(g: &CMatrix) -> f64 {
    hermitian_eigen(g).0.first().copied().unwrap_or(0.0)
}

/// `φ = φ₀ ∘ P₀` with `φ₀ = tr(ρ ·)` on `M₀`; `ρ` defaults to `I/d` and is trace-normalized.
pub fn canonical_state(sys: &WStarSystem, density: Option<&CMatrix>) -> Result<State> {
    let d = sys.ambient_dim();
    let tol = sys.tol();
    let rho = match density {
        None => identity(d) / C64::new(d as f64, 0.0),
        Some(rho) => {
            if rho.shape() != (d, d) {
                return Err(Error::shape(format!(
                    "density of shape {:?} for d = {d}",
                    rho.shape()
                )));
            }
            if !crate::numsub::is_finite(rho)
                || hs_norm(&(rho - rho.adjoint())) > tol.residual_tol * hs_norm(rho).max(1.0)
            {
                return Err(Error::input("density must be a finite Hermitian matrix"));
            }
            let tr = rho.trace().re;
            if tr <= 0.0 {
                return Err(Error::input("density must have positive trace"));
            }
            let rho = rho / C64::new(tr, 0.0);
            if min_eigenvalue(&rho) < -tol.residual_tol {
                return Err(Error::input("density is not positive semidefinite"));
            }
            rho
        }
    };
    // P₀ and the projection onto M commute, and both are Hilbert–Schmidt self-adjoint
    let riesz = sys.spectral_projection(0, &sys.algebra().space().project(&rho)?);

    let m0 = sys.spectral_subspace(0).elements();
    let g0 = gram(&m0, &riesz);
    let scale = hermitian_eigen(&g0).0.last().copied().unwrap_or(0.0);
    if min_eigenvalue(&g0) <= tol.rank_tol * scale.max(f64::MIN_POSITIVE) {
        return Err(Error::input(
            "state is not faithful on the fixed-point algebra",
        ));
    }
    let g = gram(&sys.algebra().basis(), &riesz);
    let min = min_eigenvalue(&g);
    let max = hermitian_eigen(&g).0.last().copied().unwrap_or(0.0);
    Ok(State {
        riesz,
        faithful: min > tol.rank_tol * max,
        min_gram_eigenvalue: min,
    })
}

/// Coordinates of `H` relative to a graded orthonormal basis of `M`.
#[derive(Debug, Clone)]
struct Coords {
    d: usize,
    basis: Vec<CMatrix>,
    /// `d² × k` with columns `vec(b_i)`.
    stacked: CMatrix,
    grades: Vec<i64>,
    gram_root: CMatrix,
    gram_root_inv: CMatrix,
}

impl Coords {
    fn new(sys: &WStarSystem, state: &State) -> Coords {
        let d = sys.ambient_dim();
        let mut basis = Vec::new();
        let mut grades = Vec::new();
        for (&n, sub) in sys.grading() {
            for b in sub.elements() {
                basis.push(b);
                grades.push(n);
            }
        }
        let k = basis.len();
        let stacked = CMatrix::from_fn(d * d, k, |r, j| basis[j][(r / d, r % d)]);
        let g = gram(&basis, state.riesz());
        let mut gram_root = CMatrix::zeros(k, k);
        let mut gram_root_inv = CMatrix::zeros(k, k);
        let mut start = 0;
        while start < k {
            let n = grades[start];
            let len = grades[start..].iter().take_while(|&&x| x == n).count();
            let block = g.view((start, start), (len, len)).into_owned();
            gram_root
                .view_mut((start, start), (len, len))
                .copy_from(&psd_function(&block, |x| x.max(0.0).sqrt()));
            gram_root_inv
                .view_mut((start, start), (len, len))
                .copy_from(&psd_function(&block, |x| 1.0 / x.sqrt()));
            start += len;
        }
        Coords {
            d,
            basis,
            stacked,
            grades,
            gram_root,
            gram_root_inv,
        }
    }

    fn dim(&self) -> usize {
        self.basis.len()
    }

    fn coefficients(&self, m: &CMatrix) -> CVector {
        self.stacked.adjoint() * vectorize(m)
    }

    fn vector(&self, m: &CMatrix) -> CVector {
        &self.gram_root * self.coefficients(m)
    }

    /// Matrix on `H` of the map `b ↦ f(b)` of `M` into itself.
    fn operator(&self, f: impl Fn(&CMatrix) -> CMatrix) -> CMatrix {
        let k = self.dim();
        let mut t = CMatrix::zeros(k, k);
        for (j, b) in self.basis.iter().enumerate() {
            t.set_column(j, &self.coefficients(&f(b)));
        }
        &self.gram_root * t * &self.gram_root_inv
    }

    fn rep(&self, m: &CMatrix) -> CMatrix {
        self.operator(|b| m * b)
    }

    fn commutant_rep(&self, m: &CMatrix) -> CMatrix {
        self.operator(|b| b * m)
    }

    fn modular(&self, tol: &Tolerances) -> Result<ModularData> {
        let k = self.dim();
        // K_ij = ⟨b_j*, b_i⟩ gives c(a*) = K·conj(c(a))
        let mut kmat = CMatrix::from_element(k, k, ZERO);
        for (j, b) in self.basis.iter().enumerate() {
            kmat.set_column(j, &self.coefficients(&b.adjoint()));
        }
        let s = &self.gram_root * kmat * conj(&self.gram_root_inv);
        let delta = s.transpose() * conj(&s);
        let delta_inv = &s * s.adjoint();
        let (j, _) = polar_partial_isometry(&s, tol)?;
        let delta_sqrt = psd_function(&delta, |x| x.max(0.0).sqrt());
        Ok(ModularData {
            f: ConjLinear::new(s.transpose()),
            s: ConjLinear::new(s),
            delta,
            delta_inv,
            j: ConjLinear::new(j),
            delta_sqrt,
        })
    }
}

/// The GNS standard form of `(M, φ)` together with the circle action on `H`.
#[derive(Debug, Clone)]
pub struct GnsRealization {
    system: WStarSystem,
    state: State,
    coords: Coords,
    xi0: CVector,
    modular: ModularData,
    rep_algebra: StarAlgebra,
    commutant_algebra: StarAlgebra,
}

/// Builds the standard form. The state must be faithful.
pub fn gns(sys: &WStarSystem, state: &State) -> Result<GnsRealization> {
    if !state.faithful() {
        return Err(Error::input(format!(
            "Gram matrix is numerically singular (smallest eigenvalue {:.3e})",
            state.min_gram_eigenvalue()
        )));
    }
    let tol = *sys.tol();
    let coords = Coords::new(sys, state);
    let k = coords.dim();
    let reps: Vec<CMatrix> = coords.basis.iter().map(|b| coords.rep(b)).collect();
    let coms: Vec<CMatrix> = coords
        .basis
        .iter()
        .map(|b| coords.commutant_rep(b))
        .collect();
    Ok(GnsRealization {
        system: sys.clone(),
        state: state.clone(),
        xi0: coords.vector(&identity(sys.ambient_dim())),
        modular: coords.modular(&tol)?,
        rep_algebra: StarAlgebra::from_space(orthonormalize(&reps, (k, k), &tol)?)?,
        commutant_algebra: StarAlgebra::from_space(orthonormalize(&coms, (k, k), &tol)?)?,
        coords,
    })
}

impl GnsRealization {
    pub fn system(&self) -> &WStarSystem {
        &self.system
    }

    pub fn state(&self) -> &State {
        &self.state
    }

    pub fn tol(&self) -> &Tolerances {
        self.system.tol()
    }

    /// `dim H = dim M`.
    pub fn dim(&self) -> usize {
        self.coords.dim()
    }

    /// Graded Hilbert–Schmidt orthonormal basis of `M` indexing the coordinates.
    pub fn basis(&self) -> &[CMatrix] {
        &self.coords.basis
    }

    /// Weight carried by each coordinate of `H`.
    pub fn grades(&self) -> &[i64] {
        &self.coords.grades
    }

    pub fn gram_root(&self) -> &CMatrix {
        &self.coords.gram_root
    }

    pub fn xi0(&self) -> &CVector {
        &self.xi0
    }

    pub fn modular(&self) -> &ModularData {
        &self.modular
    }

    /// `rep(M)` as an algebra of `dim H × dim H` matrices.
    pub fn rep_algebra(&self) -> &StarAlgebra {
        &self.rep_algebra
    }

    /// `M′` on `H`, realized by right multiplications.
    pub fn commutant_algebra(&self) -> &StarAlgebra {
        &self.commutant_algebra
    }

    fn require_member(&self, m: &CMatrix) -> Result<()> {
        let d = self.system.ambient_dim();
        if m.shape() != (d, d) {
            return Err(Error::shape(format!("operand {:?} for d = {d}", m.shape())));
        }
        if !self.system.algebra().contains(m)? {
            return Err(Error::input(format!(
                "operand is not in the algebra (residual {:.3e})",
                self.system.algebra().residual(m)?
            )));
        }
        Ok(())
    }

    /// Coordinates of `mξ₀` for `m ∈ M`.
    pub fn vector(&self, m: &CMatrix) -> Result<CVector> {
        self.require_member(m)?;
        Ok(self.coords.vector(m))
    }

    /// The element `m ∈ M` with `mξ₀ = ξ`.
    pub fn element(&self, xi: &CVector) -> CMatrix {
        let c = &self.coords.gram_root_inv * xi;
        let d = self.coords.d;
        crate::numsub::unvectorize(&(&self.coords.stacked * c), d, d).expect("shape")
    }

    /// Left multiplication by `m ∈ M` on `H`.
    pub fn rep(&self, m: &CMatrix) -> Result<CMatrix> {
        self.require_member(m)?;
        Ok(self.coords.rep(m))
    }

    /// Right multiplication `aξ₀ ↦ (a m)ξ₀`, an element of `M′`.
    pub fn commutant_rep(&self, m: &CMatrix) -> Result<CMatrix> {
        self.require_member(m)?;
        Ok(self.coords.commutant_rep(m))
    }

    /// `⟨ξ, η⟩` in `H`.
    pub fn inner(&self, xi: &CVector, eta: &CVector) -> C64 {
        eta.dotc(xi)
    }

    /// `U_z(mξ₀) = α_z(m)ξ₀`.
    pub fn implementing_unitary(&self, z: C64) -> Result<CMatrix> {
        if (z.norm() - 1.0).abs() > 1e-12 {
            return Err(Error::input(format!("|z| = {} is not 1", z.norm())));
        }
        let action = self.system.action();
        Ok(self.coords.operator(|b| action.apply(z, b)))
    }

    /// `α′_z(m′) = U_z m′ U_z*` for `m′ ∈ M′`.
    pub fn commutant_action(&self, z: C64, mprime: &CMatrix) -> Result<CMatrix> {
        let k = self.dim();
        if mprime.shape() != (k, k) {
            return Err(Error::shape(format!(
                "operand {:?} on H of dimension {k}",
                mprime.shape()
            )));
        }
        if !self.commutant_algebra.contains(mprime)? {
            return Err(Error::input(format!(
                "operand is not in the commutant (residual {:.3e})",
                self.commutant_algebra.residual(mprime)?
            )));
        }
        let u = self.implementing_unitary(z)?;
        Ok(&u * mprime * u.adjoint())
    }

    /// `P_n^H = (1/N) Σ_k z̄_kⁿ U_{z_k}`, exact over enough roots of unity.
    pub fn h_projection(&self, n: i64) -> CMatrix {
        let order = self.system.action().averaging_order(n);
        let k = self.dim();
        let mut acc = CMatrix::zeros(k, k);
        for s in 0..order {
            let z = unit(TAU * s as f64 / order as f64);
            acc += self.implementing_unitary(z).expect("unimodular") * unimodular_pow(z, -n);
        }
        acc / C64::new(order as f64, 0.0)
    }

    /// `H_n = {ξ : U_z ξ = zⁿ ξ}`.
    pub fn h_spectral_subspace(&self, n: i64) -> Subspace {
        Subspace::from_columns_scaled(&self.h_projection(n), *self.tol(), 1.0)
    }

    fn commutant_average(&self, n: i64, items: &[CMatrix]) -> Vec<CMatrix> {
        // conjugation by U_z doubles the weight range
        let order = (4 * self.system.action().spread() + n.abs() + 1) as usize;
        let mut acc: Vec<CMatrix> = items
            .iter()
            .map(|m| CMatrix::zeros(m.nrows(), m.ncols()))
            .collect();
        for s in 0..order {
            let z = unit(TAU * s as f64 / order as f64);
            let u = self.implementing_unitary(z).expect("unimodular");
            let phase = unimodular_pow(z, -n);
            for (a, m) in acc.iter_mut().zip(items) {
                *a += &u * m * u.adjoint() * phase;
            }
        }
        let scale = C64::new(order as f64, 0.0);
        acc.into_iter().map(|a| a / scale).collect()
    }

    /// `P_n^{M′}(m′) = (1/N) Σ_k z̄_kⁿ α′_{z_k}(m′)` without the membership check.
    pub fn commutant_projection(&self, n: i64, mprime: &CMatrix) -> CMatrix {
        self.commutant_average(n, std::slice::from_ref(mprime))
            .pop()
            .expect("one item")
    }

    /// `(M′)_n` on `H`, built from the action on `M′` alone.
    pub fn commutant_spectral_subspace(&self, n: i64) -> OperatorSubspace {
        let k = self.dim();
        let pieces = self.commutant_average(n, &self.commutant_algebra.basis());
        crate::numsub::orthonormalize_scaled(&pieces, (k, k), self.tol(), 1.0).expect("shape")
    }

    /// `sp(α′)`.
    pub fn commutant_spectrum(&self) -> Vec<i64> {
        let spread = 2 * self.system.action().spread();
        (-spread..=spread)
            .filter(|&n| self.commutant_spectral_subspace(n).dim() > 0)
            .collect()
    }

    /// `rep(M_n)` as a subspace of operators on `H`.
    pub fn rep_spectral_subspace(&self, n: i64) -> OperatorSubspace {
        let k = self.dim();
        let pieces = self.system.spectral_subspace(n).map(|m| self.coords.rep(m));
        orthonormalize(&pieces, (k, k), self.tol()).expect("shape")
    }
}
