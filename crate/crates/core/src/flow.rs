//! Circle-group actions implemented by a diagonal unitary `U_z = diag(z^{w_1}, …, z^{w_d})`.
//!
//! Periodicity forces integer weights, and in the diagonal frame every spectral
//! projection is an exact entrywise mask: `P_n` keeps `m_jk` iff `w_j − w_k = n`.

use std::collections::BTreeMap;
use std::f64::consts::TAU;

use crate::algebra::{generate, StarAlgebra};
use crate::error::{Error, Result};
use crate::numsub::{
    hermitian_eigen, hs_norm, unimodular_pow, unit, CMatrix, OperatorSubspace, Tolerances, C64,
};

/// Integer-weight circle action on `C^d`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CircleAction {
    weights: Vec<i64>,
}

impl CircleAction {
    pub fn new(weights: Vec<i64>) -> Result<Self> {
        if weights.is_empty() {
            return Err(Error::input("circle action needs at least one weight"));
        }
        Ok(CircleAction { weights })
    }

    pub fn trivial(d: usize) -> Self {
        CircleAction {
            weights: vec![0; d],
        }
    }

    /// Diagonalizes a Hermitian generator `h` with `U_{e^{iθ}} = e^{iθh}`.
    ///
    /// Returns the action together with the unitary `v` such that `h = v·diag(w)·v*`;
    /// operators must be conjugated by `v` to enter the diagonal frame. Eigenvalues that
    /// are not integers are rejected.
    pub fn from_generator(h: &CMatrix, tol: &Tolerances) -> Result<(Self, CMatrix)> {
        crate::numsub::require_square(h, "circle generator")?;
        if hs_norm(&(h - h.adjoint())) > tol.residual_tol * hs_norm(h).max(1.0) {
            return Err(Error::input("circle generator is not Hermitian"));
        }
        let (vals, vecs) = hermitian_eigen(h);
        let mut weights = Vec::with_capacity(vals.len());
        for v in vals {
            let r = v.round();
            if (v - r).abs() > 1e-6 {
                return Err(Error::input(format!(
                    "generator eigenvalue {v} is not an integer: the action would not be periodic"
                )));
            }
            weights.push(r as i64);
        }
        Ok((CircleAction { weights }, vecs))
    }

    pub fn dim(&self) -> usize {
        self.weights.len()
    }

    pub fn weights(&self) -> &[i64] {
        &self.weights
    }

    /// `max w − min w`, the largest weight difference.
    pub fn spread(&self) -> i64 {
        let max = self.weights.iter().max().copied().unwrap_or(0);
        let min = self.weights.iter().min().copied().unwrap_or(0);
        max - min
    }

    pub fn unitary(&self, z: C64) -> CMatrix {
        let d = self.dim();
        CMatrix::from_fn(d, d, |i, j| {
            if i == j {
                unimodular_pow(z, self.weights[i])
            } else {
                C64::new(0.0, 0.0)
            }
        })
    }

    /// `U_z m U_z*`, entrywise `m_jk · z^{w_j − w_k}`.
    pub fn apply(&self, z: C64, m: &CMatrix) -> CMatrix {
        CMatrix::from_fn(m.nrows(), m.ncols(), |j, k| {
            m[(j, k)] * unimodular_pow(z, self.weights[j] - self.weights[k])
        })
    }

    /// Entrywise spectral projection onto weight `n`.
    pub fn mask(&self, n: i64, m: &CMatrix) -> CMatrix {
        CMatrix::from_fn(m.nrows(), m.ncols(), |j, k| {
            if self.weights[j] - self.weights[k] == n {
                m[(j, k)]
            } else {
                C64::new(0.0, 0.0)
            }
        })
    }

    /// Number of roots of unity in the exact discrete average for weight `n`.
    pub fn averaging_order(&self, n: i64) -> usize {
        (2 * self.spread() + n.abs() + 1) as usize
    }

    /// `(1/N) Σ_k z̄_k^n α_{z_k}(m)` over the `N`-th roots of unity.
    pub fn averaged_projection(&self, n: i64, m: &CMatrix) -> CMatrix {
        let order = self.averaging_order(n);
        let mut acc = CMatrix::zeros(m.nrows(), m.ncols());
        for k in 0..order {
            let z = unit(TAU * k as f64 / order as f64);
            acc += self.apply(z, m) * unimodular_pow(z, -n);
        }
        acc / C64::new(order as f64, 0.0)
    }
}

/// The triple `(M, T, α)`: a star-closed unital matrix algebra invariant under the action.
#[derive(Debug, Clone)]
pub struct WStarSystem {
    algebra: StarAlgebra,
    action: CircleAction,
    grading: BTreeMap<i64, OperatorSubspace>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct GradedProductReport {
    pub max_residual: f64,
    pub pairs_checked: usize,
    pub passed: bool,
}

impl WStarSystem {
    /// Rejects algebras that are not α-invariant instead of symmetrizing them.
    pub fn new(algebra: StarAlgebra, action: CircleAction) -> Result<Self> {
        if !algebra.star_closed() || !algebra.unital() {
            return Err(Error::input(
                "system algebra must be star-closed and unital",
            ));
        }
        if action.dim() != algebra.ambient_dim() {
            return Err(Error::shape(format!(
                "{} weights for ambient dimension {}",
                action.dim(),
                algebra.ambient_dim()
            )));
        }
        let tol = *algebra.tol();
        let spread = action.spread();
        if spread > 0 {
            // invariance under a primitive root of order > 2·spread gives invariance
            // under every root of that order, hence under every spectral projection
            let order = 2 * spread + 1;
            let z = unit(TAU / order as f64);
            for b in algebra.basis() {
                let r = algebra.residual(&action.apply(z, &b))?;
                if r >= tol.residual_tol {
                    return Err(Error::input(format!(
                        "algebra is not invariant under the action (residual {r:.3e})"
                    )));
                }
            }
        }
        let basis = algebra.basis();
        let d = algebra.ambient_dim();
        let mut grading = BTreeMap::new();
        for n in -spread..=spread {
            let pieces: Vec<CMatrix> = basis.iter().map(|b| action.mask(n, b)).collect();
            let sub = crate::numsub::orthonormalize_scaled(&pieces, (d, d), &tol, 1.0)?;
            if sub.dim() > 0 {
                grading.insert(n, sub);
            }
        }
        Ok(WStarSystem {
            algebra,
            action,
            grading,
        })
    }

    /// Generates `M` from `generators` (adjoints and unit adjoined) and attaches the action.
    pub fn from_generators(
        generators: &[CMatrix],
        weights: Vec<i64>,
        tol: &Tolerances,
    ) -> Result<Self> {
        let algebra = generate(generators, true, true, tol)?;
        WStarSystem::new(algebra, CircleAction::new(weights)?)
    }

    /// Like [`WStarSystem::from_generators`] with the action given by a Hermitian generator;
    /// everything is moved into the generator's eigenbasis first.
    pub fn from_hermitian_generator(
        generators: &[CMatrix],
        h: &CMatrix,
        tol: &Tolerances,
    ) -> Result<Self> {
        let (action, v) = CircleAction::from_generator(h, tol)?;
        let rotated: Vec<CMatrix> = generators.iter().map(|g| v.adjoint() * g * &v).collect();
        let algebra = generate(&rotated, true, true, tol)?;
        WStarSystem::new(algebra, action)
    }

    /// Full matrix algebra with the given weights.
    pub fn full(weights: Vec<i64>, tol: &Tolerances) -> Result<Self> {
        let d = weights.len();
        WStarSystem::new(StarAlgebra::full(d, *tol), CircleAction::new(weights)?)
    }

    pub fn algebra(&self) -> &StarAlgebra {
        &self.algebra
    }

    pub fn action(&self) -> &CircleAction {
        &self.action
    }

    pub fn tol(&self) -> &Tolerances {
        self.algebra.tol()
    }

    pub fn ambient_dim(&self) -> usize {
        self.algebra.ambient_dim()
    }

    /// `α_z(m)`.
    pub fn act(&self, z: C64, m: &CMatrix) -> Result<CMatrix> {
        if (z.norm() - 1.0).abs() > 1e-12 {
            return Err(Error::input(format!("|z| = {} is not 1", z.norm())));
        }
        let d = self.ambient_dim();
        if m.shape() != (d, d) {
            return Err(Error::shape(format!("operand {:?} for d = {d}", m.shape())));
        }
        Ok(self.action.apply(z, m))
    }

    /// Exact spectral projection `P_n` (entrywise mask).
    pub fn spectral_projection(&self, n: i64, m: &CMatrix) -> CMatrix {
        self.action.mask(n, m)
    }

    /// `P_n` as the discrete Fourier average of the action; agrees with the mask exactly.
    pub fn spectral_projection_averaged(&self, n: i64, m: &CMatrix) -> CMatrix {
        self.action.averaged_projection(n, m)
    }

    /// `M_n = {m ∈ M : α_z(m) = z^n m}`; the zero subspace outside the spectrum.
    pub fn spectral_subspace(&self, n: i64) -> OperatorSubspace {
        let d = self.ambient_dim();
        self.grading
            .get(&n)
            .cloned()
            .unwrap_or_else(|| OperatorSubspace::zero(d, d, *self.tol()))
    }

    pub fn grading(&self) -> &BTreeMap<i64, OperatorSubspace> {
        &self.grading
    }

    /// Sorted `{n : M_n ≠ 0}`.
    pub fn arveson_spectrum(&self) -> Vec<i64> {
        self.grading.keys().copied().collect()
    }

    /// `P_0(m)` for `m ∈ M`.
    pub fn fixed_point_expectation(&self, m: &CMatrix) -> Result<CMatrix> {
        let r = self.algebra.residual(m)?;
        if r >= self.tol().residual_tol * hs_norm(m).max(1.0) {
            return Err(Error::input(format!(
                "operand is not in the algebra (residual {r:.3e})"
            )));
        }
        Ok(self.spectral_projection(0, m))
    }

    /// `M_n · M_k ⊆ M_{n+k}` for every pair of spectral points.
    pub fn graded_product_check(&self) -> GradedProductReport {
        let mut worst = 0.0f64;
        let mut pairs = 0;
        for (&n, mn) in &self.grading {
            for (&k, mk) in &self.grading {
                let target = self.spectral_subspace(n + k);
                for a in mn.elements() {
                    for b in mk.elements() {
                        let r = target.residual(&(&a * &b)).expect("shape");
                        worst = worst.max(r);
                    }
                }
                pairs += 1;
            }
        }
        GradedProductReport {
            max_residual: worst,
            pairs_checked: pairs,
            passed: worst < self.tol().residual_tol,
        }
    }
}

/// Seeded random system with `2 ≤ d ≤ max_dim`.
///
/// Each generator is homogeneous: its entries sit on a random subset of the positions of
/// one weight difference, so the generated algebra is graded and α-invariant. Sparse
/// generators make proper subalgebras of `M_d` common.
pub fn random_system(seed: u64, max_dim: usize, tol: &Tolerances) -> Result<WStarSystem> {
    let (weights, generators) = random_generators(seed, max_dim)?;
    WStarSystem::from_generators(&generators, weights, tol)
}

/// Weights and homogeneous generators behind [`random_system`].
pub fn random_generators(seed: u64, max_dim: usize) -> Result<(Vec<i64>, Vec<CMatrix>)> {
    use crate::numsub::random::{complex_gaussian, rng};
    use rand::Rng;

    if max_dim < 2 {
        return Err(Error::input("random systems need max_dim ≥ 2"));
    }
    let mut r = rng(seed);
    let d = r.random_range(2..=max_dim);
    let weights: Vec<i64> = (0..d).map(|_| r.random_range(-2..=2)).collect();
    let count = r.random_range(1..=3);
    let mut generators = Vec::with_capacity(count);
    for _ in 0..count {
        let (j0, k0) = (r.random_range(0..d), r.random_range(0..d));
        let n = weights[j0] - weights[k0];
        let mut g = CMatrix::zeros(d, d);
        g[(j0, k0)] = complex_gaussian(&mut r);
        for j in 0..d {
            for k in 0..d {
                if weights[j] - weights[k] == n && r.random_bool(0.5) {
                    g[(j, k)] = complex_gaussian(&mut r);
                }
            }
        }
        generators.push(g);
    }
    Ok((weights, generators))
}
