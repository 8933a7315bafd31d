//! The Hardy space `H₊ = ⊕_{n≥0} H_n`, the analytic algebras `M₊` and `(M′)₊` of
//! compressions to it, and the bookkeeping around them.

mod approx;
mod nogo;

pub use approx::{
    approximation_bound, coefficient_bound, eigenvector_span_rank, power_approximation,
    resolvent_partial_sum, resolvent_series, vandermonde_coefficients, vandermonde_residual,
    ApproxCertificate,
};
pub use nogo::{
    corner_decomposition, find_unitary_in_subspace, min_positive_spectrum, nogo_report,
    CornerDecomposition, CornerOutcome,
};

use crate::algebra::StarAlgebra;
use crate::error::{Error, Result};
use crate::gns::GnsRealization;
use crate::numsub::{identity, orthonormalize, CMatrix, OperatorSubspace, Subspace, Tolerances};
use crate::report::Check;

#[derive(Debug, Clone)]
pub struct HardyStructure {
    g: GnsRealization,
    /// `dim H × dim H₊`, orthonormal columns ordered by grade.
    embedding: CMatrix,
    plus_grades: Vec<i64>,
    hplus: Subspace,
    /// `⊕_{n≥0} M_n` as operators on the ambient space.
    preimage: OperatorSubspace,
    mplus: StarAlgebra,
    /// Generated by `(M′)_n`, `n ≥ 0`, acting on `H`.
    commutant_preimage: OperatorSubspace,
    mprimeplus: StarAlgebra,
}

/// Builds `H₊`, `M₊` and `(M′)₊` from the grading of `H`.
pub fn build_hardy(g: &GnsRealization) -> Result<HardyStructure> {
    let tol = *g.tol();
    let k = g.dim();
    let spread = 2 * g.system().action().spread();
    let mut columns = Vec::new();
    let mut plus_grades = Vec::new();
    for n in 0..=spread {
        let hn = g.h_spectral_subspace(n);
        for c in 0..hn.dim() {
            columns.push(hn.vector(c));
            plus_grades.push(n);
        }
    }
    let embedding = CMatrix::from_fn(k, columns.len(), |i, j| columns[j][i]);
    let hplus = Subspace::from_orthonormal(embedding.clone(), tol);
    let dplus = columns.len();

    let sys = g.system();
    let d = sys.ambient_dim();
    let mut pre = Vec::new();
    for (&n, sub) in sys.grading() {
        if n >= 0 {
            pre.extend(sub.elements());
        }
    }
    let preimage = orthonormalize(&pre, (d, d), &tol)?;
    let compress = |x: &CMatrix| embedding.adjoint() * x * &embedding;
    let mplus_elems: Vec<CMatrix> = pre
        .iter()
        .map(|m| compress(&g.rep(m).expect("member")))
        .collect();
    let mplus = StarAlgebra::from_space(orthonormalize(&mplus_elems, (dplus, dplus), &tol)?)?;

    let mut cpre = Vec::new();
    for n in 0..=spread {
        cpre.extend(g.commutant_spectral_subspace(n).elements());
    }
    let commutant_preimage = orthonormalize(&cpre, (k, k), &tol)?;
    let cplus: Vec<CMatrix> = cpre.iter().map(compress).collect();
    let mprimeplus = StarAlgebra::from_space(orthonormalize(&cplus, (dplus, dplus), &tol)?)?;

    Ok(HardyStructure {
        g: g.clone(),
        embedding,
        plus_grades,
        hplus,
        preimage,
        mplus,
        commutant_preimage,
        mprimeplus,
    })
}

impl HardyStructure {
    pub fn gns(&self) -> &GnsRealization {
        &self.g
    }

    pub fn tol(&self) -> &Tolerances {
        self.g.tol()
    }

    /// `dim H₊`.
    pub fn dim(&self) -> usize {
        self.embedding.ncols()
    }

    pub fn hplus(&self) -> &Subspace {
        &self.hplus
    }

    /// Isometry `H₊ → H`.
    pub fn embedding(&self) -> &CMatrix {
        &self.embedding
    }

    /// Weight of each coordinate of `H₊`.
    pub fn plus_grades(&self) -> &[i64] {
        &self.plus_grades
    }

    /// `p₊` as a `dim H × dim H` projector.
    pub fn pplus(&self) -> CMatrix {
        self.hplus.projector()
    }

    pub fn preimage(&self) -> &OperatorSubspace {
        &self.preimage
    }

    pub fn mplus(&self) -> &StarAlgebra {
        &self.mplus
    }

    pub fn commutant_preimage(&self) -> &OperatorSubspace {
        &self.commutant_preimage
    }

    pub fn mprimeplus(&self) -> &StarAlgebra {
        &self.mprimeplus
    }

    /// `p₊ X |_{H₊}` for an operator `X` on `H`.
    pub fn compress(&self, x: &CMatrix) -> CMatrix {
        self.embedding.adjoint() * x * &self.embedding
    }

    /// Projector of `H₊` onto `⊕_{k≥n} H_k`, in `H₊` coordinates.
    pub fn tail_projector(&self, n: i64) -> CMatrix {
        let dp = self.dim();
        CMatrix::from_fn(dp, dp, |i, j| {
            if i == j && self.plus_grades[i] >= n {
                crate::numsub::ONE
            } else {
                crate::numsub::ZERO
            }
        })
    }

    /// Projector of `H₊` onto `H_k`, in `H₊` coordinates.
    pub fn grade_projector(&self, k: i64) -> CMatrix {
        let dp = self.dim();
        CMatrix::from_fn(dp, dp, |i, j| {
            if i == j && self.plus_grades[i] == k {
                crate::numsub::ONE
            } else {
                crate::numsub::ZERO
            }
        })
    }
}

/// `S_x = p₊ x |_{H₊}` and the operator acting as `x*` on `⊕_{k≥n} H_k` and as `0` below.
#[derive(Debug, Clone)]
pub struct CompressionShift {
    pub sv: CMatrix,
    pub sv_adjoint: CMatrix,
    /// `‖sv_adjoint − sv*‖`.
    pub adjoint_residual: f64,
}

fn shift_pair(h: &HardyStructure, x: &CMatrix, n: i64) -> CompressionShift {
    let sv = h.compress(x);
    let sv_adjoint = h.embedding.adjoint() * x.adjoint() * &h.embedding * h.tail_projector(n);
    let adjoint_residual = (&sv_adjoint - sv.adjoint()).norm();
    CompressionShift {
        sv,
        sv_adjoint,
        adjoint_residual,
    }
}

/// Compression of `rep(v)` for `v ∈ M_n`, `n > 0`.
pub fn compression_shift(h: &HardyStructure, v: &CMatrix, n: i64) -> Result<CompressionShift> {
    if n <= 0 {
        return Err(Error::input("compression shifts need n > 0"));
    }
    let sys = h.g.system();
    let mn = sys.spectral_subspace(n);
    let r = mn.residual(v)?;
    if r >= h.tol().residual_tol * crate::numsub::hs_norm(v).max(1.0) {
        return Err(Error::input(format!(
            "operand is not in M_{n} (residual {r:.3e})"
        )));
    }
    Ok(shift_pair(h, &h.g.rep(v)?, n))
}

/// Compression of `m′ ∈ (M′)_n`, `n > 0`, given as an operator on `H`.
pub fn commutant_compression_shift(
    h: &HardyStructure,
    mprime: &CMatrix,
    n: i64,
) -> Result<CompressionShift> {
    if n <= 0 {
        return Err(Error::input("compression shifts need n > 0"));
    }
    let r = h.g.commutant_spectral_subspace(n).residual(mprime)?;
    if r >= h.tol().residual_tol * crate::numsub::hs_norm(mprime).max(1.0) {
        return Err(Error::input(format!(
            "operand is not in (M')_{n} (residual {r:.3e})"
        )));
    }
    Ok(shift_pair(h, mprime, n))
}

/// Structural checks on `H₊`, `M₊` and the compression shifts.
pub fn hardy_checks(h: &HardyStructure) -> Vec<Check> {
    let tol = h.tol().residual_tol;
    let g = &h.g;
    let sys = g.system();
    let k = g.dim();
    let pplus = h.pplus();
    let outside = identity(k) - &pplus;
    let pre = h.preimage.elements();
    let reps: Vec<CMatrix> = pre.iter().map(|m| g.rep(m).expect("member")).collect();
    let mut out = Vec::new();

    let mut invariance = 0.0f64;
    for r in &reps {
        invariance = invariance.max((&outside * r * &pplus).norm());
    }
    out.push(Check::below(
        "hardy.invariant",
        invariance,
        tol,
        "rep(M_n) H+ is contained in H+ for n >= 0",
    ));

    let mut mult = 0.0f64;
    for a in &reps {
        for b in &reps {
            mult = mult.max((h.compress(&(a * b)) - h.compress(a) * h.compress(b)).norm());
        }
    }
    out.push(Check::below(
        "hardy.multiplicative",
        mult,
        tol,
        "compression to H+ is multiplicative",
    ));

    let expected: usize = sys
        .grading()
        .iter()
        .filter(|(n, _)| **n >= 0)
        .map(|(_, s)| s.dim())
        .sum();
    out.push(Check::flag(
        "hardy.injective",
        h.mplus.dim() == expected && h.preimage.dim() == expected,
        format!(
            "dim M+ = {}, sum of dim M_n over n >= 0 = {expected}, dim H+ = {}",
            h.mplus.dim(),
            h.dim()
        ),
    ));
    out.push(Check::flag(
        "hardy.unital",
        h.mplus.unital() && h.mprimeplus.unital(),
        "M+ and (M')+ contain the identity of H+",
    ));

    let spectrum = sys.arveson_spectrum();
    let positive: Vec<i64> = spectrum.iter().copied().filter(|&n| n > 0).collect();
    if positive.is_empty() {
        out.push(Check::vacuous(
            "hardy.shift-adjoint",
            "no positive spectrum",
        ));
        out.push(Check::vacuous(
            "hardy.shift-adjoints-commute",
            "no positive spectrum",
        ));
        return out;
    }
    let mut adj = 0.0f64;
    let mut grading = 0.0f64;
    let mut commute = 0.0f64;
    let max_grade = h.plus_grades.iter().copied().max().unwrap_or(0);
    for &n in &positive {
        let cn = g.commutant_spectral_subspace(n).elements();
        for v in sys.spectral_subspace(n).elements() {
            let s = compression_shift(h, &v, n).expect("member");
            adj = adj.max(s.adjoint_residual);
            for kk in 0..=max_grade {
                let moved = &s.sv * h.grade_projector(kk);
                let leak = &moved - h.grade_projector(kk + n) * &moved;
                grading = grading.max(leak.norm());
            }
            for w in &cn {
                let t = commutant_compression_shift(h, w, n).expect("member");
                adj = adj.max(t.adjoint_residual);
                let c = &s.sv_adjoint * &t.sv_adjoint - &t.sv_adjoint * &s.sv_adjoint;
                commute = commute.max(c.norm());
            }
        }
    }
    out.push(Check::below(
        "hardy.shift-adjoint",
        adj.max(grading),
        tol,
        "S_v maps H_k into H_(k+n); its adjoint kills H_0..H_(n-1) and acts as v* above",
    ));
    out.push(Check::below(
        "hardy.shift-adjoints-commute",
        commute,
        tol,
        "S_v* S_w'* = S_w'* S_v* for v in M_n, w' in (M')_n",
    ));
    out
}
