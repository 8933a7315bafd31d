//! Sampled computation of `algLat(A)` for a unital algebra `A ⊂ B(C^D)`.
//!
//! For unital `A`, `b ∈ algLat(A)` iff `b x ∈ [Ax]` for every `x`. Each `u ⊥ [Ax]` gives
//! the linear constraint `u* b x = ⟨b, u x*⟩_HS = 0`, so the closure is the orthogonal
//! complement of the span `W` of the rank-one operators `u x*`. Every true member of
//! `algLat(A)` satisfies every constraint, hence the estimate only shrinks toward it.
//!
//! Each cyclic subspace `[Ax]` is invariant, so a sample contributes every `u k*` with
//! `u ⊥ [Ax] ∋ k`. Generic vectors are cyclic and constrain nothing. Besides structured vectors and
//! Gaussian ones, the sampler therefore drives `x` onto the locus where `dim [Ax] ≤ r`
//! by alternating least squares on `‖Y* a_i x‖`, with `Y` spanning the bottom `D − r`
//! left singular vectors of `[a_1 x … a_k x]`.

use rand::Rng;
use serde::Serialize;

use crate::algebra::StarAlgebra;
use crate::error::{Error, Result};
use crate::numsub::random::{complex_vector, rng, unit_vector, Rng64};
use crate::numsub::{
    hermitian_eigen, identity, sorted_svd, CMatrix, CVector, OperatorSubspace, Subspace,
    Tolerances, C64, ONE,
};

/// ALS iteration cap per sample.
const ALS_MAX_ITERS: usize = 400;
/// Hand a point to the subspace refinement once `σ_{r+1} / σ_1` is below this.
const ALS_ACCEPT: f64 = 1e-8;
/// Keep polishing down to this ratio while it still improves.
const ALS_POLISH: f64 = 1e-13;
const NEWTON_ITERS: usize = 12;
const NEWTON_TARGET: f64 = 1e-14;
/// New constraint directions are kept only when their component inside the current
/// closure estimate exceeds this.
const ADD_THRESHOLD: f64 = 1e-4;
/// Largest admissible `‖(I − P_K) a P_K‖` over orthonormal `a`.
const SOUNDNESS_TOL: f64 = 1e-12;

/// A unital algebra of operators on `C^D`; the non-selfadjoint case is the norm here.
#[derive(Debug, Clone)]
pub struct OperatorAlgebraCarrier {
    algebra: StarAlgebra,
}

impl OperatorAlgebraCarrier {
    pub fn new(algebra: StarAlgebra) -> Result<Self> {
        if !algebra.unital() {
            return Err(Error::precondition(
                "the cyclic-vector criterion needs a unital algebra",
            ));
        }
        Ok(OperatorAlgebraCarrier { algebra })
    }

    /// Smallest unital algebra containing `generators`, without adjoints.
    pub fn generated_by(generators: &[CMatrix], tol: &Tolerances) -> Result<Self> {
        Self::new(crate::algebra::generate(generators, false, true, tol)?)
    }

    pub fn algebra(&self) -> &StarAlgebra {
        &self.algebra
    }

    pub fn ambient_dim(&self) -> usize {
        self.algebra.ambient_dim()
    }

    pub fn dim(&self) -> usize {
        self.algebra.dim()
    }

    pub fn space(&self) -> &OperatorSubspace {
        self.algebra.space()
    }

    pub fn tol(&self) -> &Tolerances {
        self.algebra.tol()
    }
}

/// `[Ax] = span{a x : a ∈ A}`.
pub fn cyclic_subspace(a: &OperatorAlgebraCarrier, x: &CVector) -> Result<Subspace> {
    let d = a.ambient_dim();
    if x.len() != d {
        return Err(Error::shape(format!(
            "vector of length {} for D = {d}",
            x.len()
        )));
    }
    if x.norm() == 0.0 {
        return Err(Error::input("cyclic subspace of the zero vector"));
    }
    let images: Vec<CVector> = a.algebra().basis().iter().map(|b| b * x).collect();
    Subspace::span(&images, d, *a.tol())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct Sampling {
    pub seed: u64,
    /// Defaults to `40·D²`.
    pub max_samples: Option<usize>,
    pub window: usize,
}

impl Default for Sampling {
    fn default() -> Self {
        Sampling {
            seed: 0,
            max_samples: None,
            window: 12,
        }
    }
}

impl Sampling {
    pub fn with_seed(seed: u64) -> Self {
        Sampling {
            seed,
            ..Sampling::default()
        }
    }

    fn budget(&self, d: usize) -> Result<usize> {
        let max = self.max_samples.unwrap_or(40 * d * d);
        if self.window == 0 || max < self.window {
            return Err(Error::input(format!(
                "sampling needs max_samples ≥ window ≥ 1 (got {max}, {})",
                self.window
            )));
        }
        Ok(max)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Verdict {
    Reflexive,
    NonReflexive,
    Inconclusive,
}

#[derive(Debug, Clone, Serialize)]
pub struct ReflexivityReport {
    pub input_dim: usize,
    pub closure_dim: usize,
    pub verdict: Verdict,
    /// Orthonormal basis of the closure modulo `A`.
    #[serde(skip)]
    pub witnesses: Vec<CMatrix>,
    pub witness_count: usize,
    pub samples_used: usize,
    pub constraining_samples: usize,
    pub stabilization_window: usize,
    pub revalidation_samples: usize,
    pub seed: u64,
    /// `‖(I − P_closure) A‖`, the containment residual of `A` in the closure.
    pub containment_residual: f64,
    /// Largest `|u* a x|` over all accepted constraints.
    pub max_residual: f64,
}

/// Constraint span `W` together with the algebra it must annihilate.
struct Engine<'a> {
    d: usize,
    basis: Vec<CMatrix>,
    /// `D² × k`, columns `vec(a_i)`.
    a_stack: CMatrix,
    w: CMatrix,
    max_residual: f64,
    tol: &'a Tolerances,
}

enum Draw {
    Rank(usize),
    Gaussian,
}

impl<'a> Engine<'a> {
    fn new(a: &'a OperatorAlgebraCarrier) -> Self {
        let d = a.ambient_dim();
        let basis = a.algebra().basis();
        let a_stack = CMatrix::from_fn(d * d, basis.len(), |r, j| basis[j][(r / d, r % d)]);
        Engine {
            d,
            basis,
            a_stack,
            w: CMatrix::zeros(d * d, 0),
            max_residual: 0.0,
            tol: a.tol(),
        }
    }

    fn closure_dim(&self) -> usize {
        self.d * self.d - self.w.ncols()
    }

    /// `[a_1 x … a_k x]`, padded with zero columns to at least `D` columns.
    fn orbit(&self, x: &CVector) -> CMatrix {
        let cols = self.basis.len().max(self.d);
        let mut m = CMatrix::zeros(self.d, cols);
        for (j, a) in self.basis.iter().enumerate() {
            m.set_column(j, &(a * x));
        }
        m
    }

    /// `([Ax], [Ax]^⊥)` as orthonormal bases, the rank either given or measured, together
    /// with `σ_{r+1} / σ_1`.
    fn split(&self, x: &CVector, rank: Option<usize>) -> (CMatrix, CMatrix, f64) {
        let (u, s, _) = sorted_svd(&self.orbit(x));
        let smax = s[0];
        let r = rank.unwrap_or_else(|| s.iter().filter(|&&v| v > self.tol.rank_tol * smax).count());
        let ratio = if r < self.d && smax > 0.0 {
            s[r] / smax
        } else {
            0.0
        };
        (
            u.columns(0, r).into_owned(),
            u.columns(r, self.d - r).into_owned(),
            ratio,
        )
    }

    /// `max_a ‖(I − P_K) a P_K‖_HS` for an orthonormal basis `k` with complement `kp`.
    fn invariance_residual(&self, k: &CMatrix, kp: &CMatrix) -> f64 {
        self.basis
            .iter()
            .map(|a| (kp.adjoint() * a * k).norm())
            .fold(0.0, f64::max)
    }

    /// Newton refinement of a nearly common invariant subspace.
    ///
    /// Writing `K' = span(K + K^⊥ X)`, the linearized condition for every `a` reads
    /// `A₂₂ X − X A₁₁ = −A₂₁` in the block form of `a` over `K ⊕ K^⊥`; the stacked system
    /// is solved in the least-squares sense.
    fn refine(&self, mut k: CMatrix, mut kp: CMatrix) -> (CMatrix, CMatrix, f64) {
        let (r, c) = (k.ncols(), kp.ncols());
        let n = r * c;
        let mut eta = self.invariance_residual(&k, &kp);
        for _ in 0..NEWTON_ITERS {
            if eta <= NEWTON_TARGET {
                break;
            }
            let mut normal = CMatrix::zeros(n, n);
            let mut rhs = CVector::zeros(n);
            for a in &self.basis {
                let a11 = k.adjoint() * a * &k;
                let a21 = kp.adjoint() * a * &k;
                let a22 = kp.adjoint() * a * &kp;
                let l = identity(r).kronecker(&a22) - a11.transpose().kronecker(&identity(c));
                let b = -CVector::from_column_slice(a21.as_slice());
                normal += l.adjoint() * &l;
                rhs += l.adjoint() * b;
            }
            let (vals, vecs) = hermitian_eigen(&normal);
            let top = vals.last().copied().unwrap_or(0.0);
            let mut step = CVector::zeros(n);
            for (j, &v) in vals.iter().enumerate() {
                if v > 1e-12 * top {
                    let col = vecs.column(j);
                    step += col * (col.dotc(&rhs) / C64::new(v, 0.0));
                }
            }
            let x = CMatrix::from_column_slice(c, r, step.as_slice());
            let q = (&k + &kp * x).qr().q();
            let cand_kp = complement(&q);
            let next = self.invariance_residual(&q, &cand_kp);
            if next >= eta {
                break;
            }
            k = q;
            kp = cand_kp;
            eta = next;
        }
        (k, kp, eta)
    }

    /// Minimizer of `Σ_i ‖Y* a_i x‖` over unit `x`.
    fn best_vector(&self, y: &CMatrix) -> CVector {
        let rows = y.ncols();
        let k = self.basis.len();
        let mut stack = CMatrix::zeros(rows * k, self.d);
        for (i, a) in self.basis.iter().enumerate() {
            stack
                .view_mut((i * rows, 0), (rows, self.d))
                .copy_from(&(y.adjoint() * a));
        }
        let padded = if stack.nrows() < self.d {
            let mut p = CMatrix::zeros(self.d, self.d);
            p.view_mut((0, 0), (stack.nrows(), self.d))
                .copy_from(&stack);
            p
        } else {
            stack
        };
        let (_, _, vt) = sorted_svd(&padded);
        vt.row(self.d - 1).adjoint()
    }

    /// Drives a random start onto `{x : dim [Ax] ≤ r}`.
    fn rank_deficient_point(&self, rng: &mut Rng64, r: usize) -> Option<CVector> {
        let mut x = unit_vector(rng, self.d);
        let mut best = f64::INFINITY;
        for _ in 0..ALS_MAX_ITERS {
            let (_, y, ratio) = self.split(&x, Some(r));
            if ratio <= ALS_POLISH || (ratio <= ALS_ACCEPT && ratio > 0.5 * best) {
                return Some(x);
            }
            best = best.min(ratio);
            x = self.best_vector(&y);
        }
        let (_, _, ratio) = self.split(&x, Some(r));
        (ratio <= ALS_ACCEPT).then_some(x)
    }

    /// Rank-one constraints `u k*` for `u ⊥ K`, `k ∈ K`, where `K` is `[Ax]` refined to a
    /// common invariant subspace; `None` if the refinement does not reach soundness.
    fn constraints(&mut self, x: &CVector, rank: Option<usize>) -> Option<CMatrix> {
        let x = x / C64::new(x.norm(), 0.0);
        let (k, kp, _) = self.split(&x, rank);
        if kp.ncols() == 0 || k.ncols() == 0 {
            return Some(CMatrix::zeros(self.d * self.d, 0));
        }
        let (k, kp, eta) = self.refine(k, kp);
        if eta > SOUNDNESS_TOL {
            return None;
        }
        self.max_residual = self.max_residual.max(eta);
        let d = self.d;
        let r = k.ncols();
        let batch = CMatrix::from_fn(d * d, r * kp.ncols(), |row, col| {
            kp[(row / d, col / r)] * k[(row % d, col % r)].conj()
        });
        // `A ⊆ algLat(A)` always, so the constraint span must miss `A` entirely
        Some(&batch - &self.a_stack * (self.a_stack.adjoint() * &batch))
    }

    /// Adds the part of `batch` outside `W`; returns the number of new directions.
    fn add(&mut self, batch: &CMatrix) -> usize {
        if batch.ncols() == 0 {
            return 0;
        }
        let mut rest = batch - &self.w * (self.w.adjoint() * batch);
        // second pass against loss of orthogonality
        rest -= &self.w * (self.w.adjoint() * &rest);
        let (u, s, _) = sorted_svd(&rest);
        let keep = s.iter().filter(|&&v| v > ADD_THRESHOLD).count();
        if keep == 0 {
            return 0;
        }
        let old = self.w.ncols();
        let mut w = CMatrix::zeros(self.w.nrows(), old + keep);
        w.columns_mut(0, old).copy_from(&self.w);
        w.columns_mut(old, keep).copy_from(&u.columns(0, keep));
        self.w = w;
        keep
    }

    /// `‖W* A‖`, the leak of the algebra into the constraint span.
    fn containment_residual(&self) -> f64 {
        if self.w.ncols() == 0 {
            return 0.0;
        }
        let leak = self.w.adjoint() * &self.a_stack;
        crate::numsub::op_norm(&leak)
    }

    fn sample(&mut self, rng: &mut Rng64, draw: Draw) -> Option<CMatrix> {
        match draw {
            Draw::Rank(r) => {
                let x = self.rank_deficient_point(rng, r)?;
                self.constraints(&x, Some(r))
            }
            Draw::Gaussian => {
                let x = complex_vector(rng, self.d);
                self.constraints(&x, None)
            }
        }
    }

    /// `D − 1` rank targets followed by one Gaussian draw.
    fn sweep_draw(&self, index: usize) -> Draw {
        let len = self.d;
        let pos = index % len;
        if pos + 1 == len {
            Draw::Gaussian
        } else {
            Draw::Rank(self.d - 1 - pos)
        }
    }

    /// Orthonormal basis of `(W ⊕ A)^⊥`, i.e. the closure modulo `A`.
    fn witnesses(&self) -> Vec<CMatrix> {
        let n = self.d * self.d;
        if self.closure_dim() <= self.basis.len() {
            return Vec::new();
        }
        let mut both = CMatrix::zeros(n, self.w.ncols() + self.a_stack.ncols());
        both.columns_mut(0, self.w.ncols()).copy_from(&self.w);
        both.columns_mut(self.w.ncols(), self.a_stack.ncols())
            .copy_from(&self.a_stack);
        let span = Subspace::from_columns(&both, *self.tol);
        let rest = span.orthogonal_complement();
        (0..rest.dim())
            .map(|c| crate::numsub::unvectorize(&rest.vector(c), self.d, self.d).expect("shape"))
            .collect()
    }

    fn closure(&self) -> OperatorSubspace {
        let n = self.d * self.d;
        let space = if self.w.ncols() == 0 {
            Subspace::full(n, *self.tol)
        } else {
            Subspace::from_orthonormal(self.w.clone(), *self.tol).orthogonal_complement()
        };
        OperatorSubspace::from_space(self.d, self.d, space).expect("shape")
    }
}

/// Orthonormal complement of the orthonormal columns of `q`.
fn complement(q: &CMatrix) -> CMatrix {
    let (d, r) = q.shape();
    let mut padded = CMatrix::zeros(d, d);
    padded.columns_mut(0, r).copy_from(q);
    let (u, _, _) = sorted_svd(&padded);
    u.columns(r, d - r).into_owned()
}

fn structured_vectors(d: usize) -> Vec<CVector> {
    let e = |i: usize| {
        let mut v = CVector::zeros(d);
        v[i] = ONE;
        v
    };
    let mut out: Vec<CVector> = (0..d).map(e).collect();
    for i in 0..d {
        for j in i + 1..d {
            out.push(e(i) + e(j));
        }
    }
    out
}

/// Sampled `algLat(A)` with a graded verdict.
pub fn reflexive_closure(
    a: &OperatorAlgebraCarrier,
    sampling: &Sampling,
) -> Result<(OperatorSubspace, ReflexivityReport)> {
    let d = a.ambient_dim();
    let max_samples = sampling.budget(d)?;
    let mut engine = Engine::new(a);
    let mut rng = rng(sampling.seed);
    let mut used = 0;
    let mut constraining = 0;

    let record = |engine: &mut Engine, batch: Option<CMatrix>, used: &mut usize| {
        *used += 1;
        let before = engine.closure_dim();
        if let Some(batch) = batch {
            engine.add(&batch);
        }
        let after = engine.closure_dim();
        assert!(after <= before, "closure dimension increased");
        after < before
    };

    for x in structured_vectors(d) {
        if used >= max_samples {
            break;
        }
        let batch = engine.constraints(&x, None);
        if record(&mut engine, batch, &mut used) {
            constraining += 1;
        }
    }

    let window = sampling.window.max(d);
    let mut quiet = 0;
    let mut index = 0;
    while used < max_samples && quiet < window && d > 1 {
        let draw = engine.sweep_draw(index);
        index += 1;
        let batch = engine.sample(&mut rng, draw);
        if record(&mut engine, batch, &mut used) {
            constraining += 1;
            quiet = 0;
        } else {
            quiet += 1;
        }
    }

    let input_dim = a.dim();
    let mut revalidation = 0;
    let mut verdict = if engine.closure_dim() == input_dim {
        Verdict::Reflexive
    } else {
        Verdict::NonReflexive
    };
    if verdict == Verdict::NonReflexive {
        let before = engine.closure_dim();
        let mut fresh = crate::numsub::random::rng(sampling.seed ^ 0x9e37_79b9_7f4a_7c15);
        let offset: usize = fresh.random_range(0..d.max(1));
        for i in 0..10 * d {
            let draw = engine.sweep_draw(i + offset);
            let batch = engine.sample(&mut fresh, draw);
            record(&mut engine, batch, &mut revalidation);
        }
        let after = engine.closure_dim();
        if after == input_dim {
            verdict = Verdict::Reflexive;
        } else if after < before {
            verdict = Verdict::Inconclusive;
        }
    }

    let containment = engine.containment_residual();
    let witnesses = engine.witnesses();
    if containment >= a.tol().subspace_tol {
        verdict = Verdict::Inconclusive;
    }
    let closure = if engine.closure_dim() == input_dim {
        a.space().clone()
    } else {
        engine.closure()
    };
    let report = ReflexivityReport {
        input_dim,
        closure_dim: engine.closure_dim(),
        verdict,
        witness_count: witnesses.len(),
        witnesses,
        samples_used: used,
        constraining_samples: constraining,
        stabilization_window: window,
        revalidation_samples: revalidation,
        seed: sampling.seed,
        containment_residual: containment,
        max_residual: engine.max_residual,
    };
    Ok((closure, report))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::StarAlgebra;
    use crate::numsub::{matrix_unit, ZERO};

    fn tol() -> Tolerances {
        Tolerances::default()
    }

    fn jordan(d: usize) -> CMatrix {
        let mut j = CMatrix::zeros(d, d);
        for i in 0..d - 1 {
            j[(i, i + 1)] = ONE;
        }
        j
    }

    fn upper_triangular(d: usize) -> OperatorAlgebraCarrier {
        let mut gens = Vec::new();
        for i in 0..d {
            for j in i..d {
                gens.push(matrix_unit(d, i, j));
            }
        }
        OperatorAlgebraCarrier::generated_by(&gens, &tol()).unwrap()
    }

    #[test]
    fn cyclic_subspace_examples() {
        let scalars = OperatorAlgebraCarrier::new(StarAlgebra::scalars(3, tol())).unwrap();
        let mut e1 = CVector::zeros(3);
        e1[0] = ONE;
        assert_eq!(cyclic_subspace(&scalars, &e1).unwrap().dim(), 1);
        let full = OperatorAlgebraCarrier::new(StarAlgebra::full(3, tol())).unwrap();
        assert_eq!(cyclic_subspace(&full, &e1).unwrap().dim(), 3);
        let mut e2 = CVector::zeros(3);
        e2[1] = ONE;
        let k = cyclic_subspace(&upper_triangular(3), &e2).unwrap();
        assert_eq!(k.dim(), 2);
        assert!(k.residual(&e1) < 1e-12);
        assert!(cyclic_subspace(&full, &CVector::from_element(3, ZERO)).is_err());
    }

    #[test]
    fn full_algebra_is_reflexive() {
        let full = OperatorAlgebraCarrier::new(StarAlgebra::full(3, tol())).unwrap();
        let (_, r) = reflexive_closure(&full, &Sampling::default()).unwrap();
        assert_eq!(r.verdict, Verdict::Reflexive);
        assert_eq!(r.closure_dim, 9);
    }

    #[test]
    fn upper_triangular_is_reflexive() {
        let (_, r) = reflexive_closure(&upper_triangular(3), &Sampling::default()).unwrap();
        assert_eq!(r.verdict, Verdict::Reflexive, "{r:?}");
        assert_eq!(r.closure_dim, 6);
    }

    #[test]
    fn jordan_polynomials_close_to_upper_triangular() {
        let a = OperatorAlgebraCarrier::generated_by(&[jordan(4)], &tol()).unwrap();
        assert_eq!(a.dim(), 4);
        let (closure, r) = reflexive_closure(&a, &Sampling::default()).unwrap();
        assert_eq!(r.verdict, Verdict::NonReflexive, "{r:?}");
        assert_eq!(r.closure_dim, 10);
        assert_eq!(r.witness_count, 6);
        let ut = upper_triangular(4);
        assert!(closure.compare(ut.space()).unwrap().distance < 1e-8);
    }

    #[test]
    fn nilpotent_pair_closes_to_triangular() {
        let a = OperatorAlgebraCarrier::generated_by(&[matrix_unit(2, 0, 1)], &tol()).unwrap();
        assert_eq!(a.dim(), 2);
        let (_, r) = reflexive_closure(&a, &Sampling::default()).unwrap();
        assert_eq!(r.closure_dim, 3);
        assert_eq!(r.verdict, Verdict::NonReflexive);
    }

    #[test]
    fn identical_seeds_are_deterministic() {
        let a = OperatorAlgebraCarrier::generated_by(&[jordan(3)], &tol()).unwrap();
        let (_, r1) = reflexive_closure(&a, &Sampling::with_seed(5)).unwrap();
        let (_, r2) = reflexive_closure(&a, &Sampling::with_seed(5)).unwrap();
        assert_eq!(
            serde_json::to_string(&r1).unwrap(),
            serde_json::to_string(&r2).unwrap()
        );
    }

    #[test]
    fn sampling_validation() {
        let a = OperatorAlgebraCarrier::new(StarAlgebra::full(2, tol())).unwrap();
        let bad = Sampling {
            seed: 0,
            max_samples: Some(3),
            window: 5,
        };
        assert!(reflexive_closure(&a, &bad).is_err());
        assert!(OperatorAlgebraCarrier::new(
            crate::algebra::generate(&[matrix_unit(2, 0, 1)], false, false, &tol()).unwrap()
        )
        .is_err());
    }
}
