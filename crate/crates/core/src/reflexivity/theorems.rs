//! Reflexivity statements about `M₊`, nest systems and corner decompositions.

use rand::Rng;
use serde::Serialize;

use crate::algebra::{commutant, commutant_of, direct_sum, generate, StarAlgebra};
use crate::error::{Error, Result};
use crate::flow::{CircleAction, WStarSystem};
use crate::gns::{canonical_state, gns};
use crate::hardy::{build_hardy, HardyStructure};
use crate::numsub::random::rng;
use crate::numsub::{
    hs_norm, identity, matrix_pow, matrix_unit, orthonormal_columns, orthonormalize,
    polar_partial_isometry, CMatrix, OperatorSubspace, Subspace, Tolerances,
};
use crate::report::{Check, Status};

use super::closure::{
    reflexive_closure, OperatorAlgebraCarrier, ReflexivityReport, Sampling, Verdict,
};

/// `((M′)₊)′ = M₊` on `H₊`, plus the unasserted comparison of `(M₊)′` with `(M′)₊`.
pub fn commutant_duality_check(h: &HardyStructure) -> Result<Vec<Check>> {
    let tol = *h.tol();
    let d = h.dim();
    let dual = commutant_of(&h.mprimeplus().basis(), d, &tol)?;
    let cmp = dual.space().compare(h.mplus().space())?;
    let mut out = vec![Check::below(
        "duality.commutant-of-commutant-plus",
        cmp.distance,
        tol.subspace_tol,
        format!(
            "dim ((M')+)' = {}, dim M+ = {}",
            dual.dim(),
            h.mplus().dim()
        ),
    )];

    let other = commutant(h.mplus())?;
    let cmp = other.space().compare(h.mprimeplus().space())?;
    let equal = cmp.distance < tol.subspace_tol;
    let mut diag = Check::below(
        "duality.commutant-of-plus-diagnostic",
        cmp.distance,
        tol.subspace_tol,
        format!(
            "diagnostic only: dim (M+)' = {}, dim (M')+ = {}",
            other.dim(),
            h.mprimeplus().dim()
        ),
    );
    if !equal {
        diag = diag.with_status(Status::Inconclusive);
    }
    out.push(diag);
    Ok(out)
}

/// Nilpotency index of `w`, if at most `w.nrows()`.
fn nilpotency_index(w: &CMatrix, tol: f64) -> Option<usize> {
    (1..=w.nrows()).find(|&k| hs_norm(&matrix_pow(w, k)) < tol)
}

/// Polar parts of the compressed `(M′)_n`, `n > 0`, commute with the closure basis.
pub fn isometry_commutation_check(h: &HardyStructure, closure: &OperatorSubspace) -> Result<Check> {
    let anchor = "reflexivity.closure-commutes-with-commutant-isometries";
    let g = h.gns();
    let tol = *h.tol();
    let mut isometries = Vec::new();
    for n in g.commutant_spectrum().into_iter().filter(|&n| n > 0) {
        for m in g.commutant_spectral_subspace(n).elements() {
            let c = h.compress(&m);
            if hs_norm(&c) > tol.rank_tol {
                isometries.push(polar_partial_isometry(&c, &tol)?.0);
            }
        }
    }
    if isometries.is_empty() {
        return Ok(Check::vacuous(
            anchor,
            "no positive spectrum for the commutant on H+",
        ));
    }
    let nilpotent = isometries
        .iter()
        .filter(|w| nilpotency_index(w, tol.residual_tol).is_some())
        .count();
    let mut worst = 0.0f64;
    for b in closure.elements() {
        for w in &isometries {
            worst = worst.max(hs_norm(&(&b * w - w * &b)));
        }
    }
    Ok(Check::below(
        anchor,
        worst,
        tol.residual_tol,
        format!(
            "{} partial isometries ({nilpotent} nilpotent) against {} closure elements",
            isometries.len(),
            closure.dim()
        ),
    ))
}

/// Output of the `canonical_state → gns → build_hardy → reflexive_closure` pipeline.
#[derive(Debug, Clone)]
pub struct PositivePartRun {
    pub hardy: HardyStructure,
    pub closure: OperatorSubspace,
    pub report: ReflexivityReport,
    /// Largest of the two containment residuals between the closure and `M₊`.
    pub two_sided_residual: f64,
}

impl PositivePartRun {
    pub fn check(&self) -> Check {
        let r = &self.report;
        let details = format!(
            "dim M+ = {}, closure dim = {}, {} samples, verdict {:?}",
            r.input_dim, r.closure_dim, r.samples_used, r.verdict
        );
        let anchor = "reflexivity.positive-part-reflexive";
        let tol = self.hardy.tol().subspace_tol;
        let residual = self.two_sided_residual.max(r.containment_residual);
        match r.verdict {
            Verdict::Reflexive => Check::below(anchor, residual, tol, details),
            Verdict::NonReflexive => {
                Check::below(anchor, residual, tol, details).with_status(Status::Fail)
            }
            Verdict::Inconclusive => {
                Check::below(anchor, residual, tol, details).with_status(Status::Inconclusive)
            }
        }
    }
}

/// Reflexivity of `M₊` for the state with the given density (default `I/d`).
pub fn theorem5_verify(
    sys: &WStarSystem,
    density: Option<&CMatrix>,
    sampling: &Sampling,
) -> Result<PositivePartRun> {
    let state = canonical_state(sys, density)?;
    let g = gns(sys, &state)?;
    let hardy = build_hardy(&g)?;
    let carrier = OperatorAlgebraCarrier::new(hardy.mplus().clone())?;
    let (closure, report) = reflexive_closure(&carrier, sampling)?;
    let cmp = closure.compare(hardy.mplus().space())?;
    Ok(PositivePartRun {
        two_sided_residual: cmp.first_in_second.max(cmp.second_in_first),
        hardy,
        closure,
        report,
    })
}

/// Block-upper-triangular matrices for consecutive diagonal blocks of the given sizes.
pub fn block_upper_triangular(block_sizes: &[usize], tol: &Tolerances) -> Result<OperatorSubspace> {
    let block = block_index(block_sizes);
    let d = block.len();
    let mut units = Vec::new();
    for i in 0..d {
        for j in 0..d {
            if block[i] <= block[j] {
                units.push(matrix_unit(d, i, j));
            }
        }
    }
    orthonormalize(&units, (d, d), tol)
}

fn block_index(block_sizes: &[usize]) -> Vec<usize> {
    block_sizes
        .iter()
        .enumerate()
        .flat_map(|(b, &s)| std::iter::repeat_n(b, s))
        .collect()
}

/// Full matrix algebra with `U_z = Σ z^{wᵢ} pᵢ` over consecutive blocks; returns the system
/// and `dim M₊ = Σ_{block(i) ≤ block(j)} 1`.
///
/// With strictly decreasing weights, `M₊` is the nest algebra of `p₁ ≤ p₁+p₂ ≤ …`; the
/// preimage is compared with the block-upper-triangular algebra before returning.
pub fn nest_example(
    block_sizes: &[usize],
    weights: &[i64],
    tol: &Tolerances,
) -> Result<(WStarSystem, usize)> {
    if block_sizes.is_empty() || block_sizes.len() != weights.len() {
        return Err(Error::input(format!(
            "{} block sizes for {} weights",
            block_sizes.len(),
            weights.len()
        )));
    }
    if block_sizes.contains(&0) {
        return Err(Error::input("block sizes must be positive"));
    }
    if weights.windows(2).any(|w| w[0] <= w[1]) {
        return Err(Error::input(format!(
            "weights {weights:?} must be strictly decreasing"
        )));
    }
    let block = block_index(block_sizes);
    let per_site: Vec<i64> = block.iter().map(|&b| weights[b]).collect();
    let sys = WStarSystem::new(
        StarAlgebra::full(block.len(), *tol),
        CircleAction::new(per_site)?,
    )?;
    let expected: usize = block_sizes
        .iter()
        .enumerate()
        .map(|(i, &si)| si * block_sizes[i..].iter().sum::<usize>())
        .sum();
    let d = block.len();
    let mut pre = Vec::new();
    for (&n, sub) in sys.grading() {
        if n >= 0 {
            pre.extend(sub.elements());
        }
    }
    let preimage = orthonormalize(&pre, (d, d), tol)?;
    let nest = block_upper_triangular(block_sizes, tol)?;
    let cmp = preimage.compare(&nest)?;
    if cmp.distance >= tol.subspace_tol || preimage.dim() != expected {
        return Err(Error::Internal(format!(
            "nest preimage mismatch: dim {} vs {expected}, distance {:.3e}",
            preimage.dim(),
            cmp.distance
        )));
    }
    Ok((sys, expected))
}

#[derive(Debug, Clone, Serialize)]
pub struct CornerVerdict {
    pub verdict: Verdict,
    pub corners: Vec<ReflexivityReport>,
    pub direct: ReflexivityReport,
    pub agrees: bool,
}

fn is_projector(q: &CMatrix, tol: f64) -> bool {
    q.is_square() && hs_norm(&(q * q - q)) < tol && hs_norm(&(q.adjoint() - q)) < tol
}

/// Reflexivity of `A` from its corners `qᵢ A qᵢ`, checked against the direct closure.
pub fn combine_reflexive_corners(
    a: &OperatorAlgebraCarrier,
    q_list: &[CMatrix],
    sampling: &Sampling,
) -> Result<CornerVerdict> {
    let d = a.ambient_dim();
    let tol = *a.tol();
    let eps = tol.residual_tol;
    if q_list.is_empty() {
        return Err(Error::input("no projectors given"));
    }
    for (k, q) in q_list.iter().enumerate() {
        if q.shape() != (d, d) {
            return Err(Error::shape(format!(
                "projector {k} is {:?} for D = {d}",
                q.shape()
            )));
        }
        if !is_projector(q, eps) {
            return Err(Error::input(format!(
                "q[{k}] is not an orthogonal projector"
            )));
        }
    }
    for i in 0..q_list.len() {
        for j in i + 1..q_list.len() {
            if hs_norm(&(&q_list[i] * &q_list[j])) >= eps {
                return Err(Error::precondition(format!(
                    "q[{i}] and q[{j}] are not orthogonal"
                )));
            }
        }
    }
    let basis = a.algebra().basis();
    for (k, q) in q_list.iter().enumerate() {
        let worst = basis
            .iter()
            .map(|b| hs_norm(&(q * b - b * q)))
            .fold(0.0, f64::max);
        if worst >= eps {
            return Err(Error::precondition(format!(
                "hypothesis i fails: q[{k}] does not commute with A (residual {worst:.3e})"
            )));
        }
    }
    let total = q_list.iter().fold(CMatrix::zeros(d, d), |acc, q| acc + q);
    let gap = hs_norm(&(total - identity(d)));
    if gap >= eps {
        return Err(Error::precondition(format!(
            "hypothesis iii fails: the projectors sum to I only up to {gap:.3e}"
        )));
    }

    let mut corners = Vec::new();
    for (k, q) in q_list.iter().enumerate() {
        let v = orthonormal_columns(q, tol.rank_tol, 0.0);
        let r = v.ncols();
        if r == 0 {
            continue;
        }
        let pieces: Vec<CMatrix> = basis.iter().map(|b| v.adjoint() * b * &v).collect();
        let corner = StarAlgebra::from_space(orthonormalize(&pieces, (r, r), &tol)?)?;
        let carrier = OperatorAlgebraCarrier::new(corner)?;
        let s = Sampling {
            seed: sampling.seed.wrapping_add(k as u64 + 1),
            ..*sampling
        };
        corners.push(reflexive_closure(&carrier, &s)?.1);
    }
    let verdict = if corners.iter().all(|c| c.verdict == Verdict::Reflexive) {
        Verdict::Reflexive
    } else if corners.iter().any(|c| c.verdict == Verdict::NonReflexive) {
        Verdict::NonReflexive
    } else {
        Verdict::Inconclusive
    };
    let direct = reflexive_closure(a, sampling)?.1;
    Ok(CornerVerdict {
        agrees: direct.verdict == verdict,
        verdict,
        corners,
        direct,
    })
}

/// Building blocks for corner fixtures.
fn fixture_block(kind: usize, size: usize, tol: &Tolerances) -> Result<StarAlgebra> {
    let mut jordan = CMatrix::zeros(size, size);
    for i in 0..size.saturating_sub(1) {
        jordan[(i, i + 1)] = crate::numsub::ONE;
    }
    match kind {
        0 => Ok(StarAlgebra::full(size, *tol)),
        1 => {
            let units: Vec<CMatrix> = (0..size)
                .flat_map(|i| (i..size).map(move |j| (i, j)))
                .map(|(i, j)| matrix_unit(size, i, j))
                .collect();
            generate(&units, false, true, tol)
        }
        2 => generate(&[jordan], false, true, tol),
        _ => Ok(StarAlgebra::diagonal(size, *tol)),
    }
}

/// Seeded block-diagonal algebra with its block projectors. Blocks are full, upper
/// triangular, polynomials in a Jordan block, or diagonal, of sizes 1 to 3.
pub fn corner_fixture(
    seed: u64,
    tol: &Tolerances,
) -> Result<(OperatorAlgebraCarrier, Vec<CMatrix>)> {
    let mut r = rng(seed);
    let blocks = r.random_range(2..=3usize);
    let mut algebra: Option<StarAlgebra> = None;
    let mut sizes = Vec::new();
    for _ in 0..blocks {
        let size = r.random_range(1..=3usize);
        let kind = r.random_range(0..4usize);
        let b = fixture_block(kind, size, tol)?;
        algebra = Some(match algebra {
            None => b,
            Some(a) => direct_sum(&a, &b)?,
        });
        sizes.push(size);
    }
    let algebra = algebra.expect("at least two blocks");
    let d: usize = sizes.iter().sum();
    let mut offset = 0;
    let mut qs = Vec::new();
    for s in sizes {
        let mut q = CMatrix::zeros(d, d);
        for i in offset..offset + s {
            q[(i, i)] = crate::numsub::ONE;
        }
        offset += s;
        qs.push(q);
    }
    Ok((OperatorAlgebraCarrier::new(algebra)?, qs))
}

/// Chain of kernels `ker aᵏ`, `k = 1..D`, of a single operator.
pub fn kernel_chain(a: &CMatrix, tol: &Tolerances) -> Vec<Subspace> {
    let d = a.nrows();
    (1..=d)
        .map(|k| {
            let p = matrix_pow(a, k);
            let null = crate::numsub::null_space(&p, tol.rank_tol);
            Subspace::from_orthonormal(null, *tol)
        })
        .filter(|s| s.dim() > 0 && s.dim() < d)
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn tol() -> Tolerances {
        Tolerances::default()
    }

    fn hardy_of(sys: &WStarSystem) -> HardyStructure {
        let g = gns(sys, &canonical_state(sys, None).unwrap()).unwrap();
        build_hardy(&g).unwrap()
    }

    #[test]
    fn duality_on_full3() {
        let sys = WStarSystem::full(vec![0, 1, 2], &tol()).unwrap();
        let checks = commutant_duality_check(&hardy_of(&sys)).unwrap();
        assert_eq!(checks[0].status, Status::Pass);
        assert!(checks[0].residual < 1e-9);
    }

    #[test]
    fn duality_with_trivial_action() {
        let sys = WStarSystem::full(vec![0, 0], &tol()).unwrap();
        let checks = commutant_duality_check(&hardy_of(&sys)).unwrap();
        assert!(checks.iter().all(|c| c.status == Status::Pass));
    }

    #[test]
    fn positive_part_full3() {
        let sys = WStarSystem::full(vec![0, 1, 2], &tol()).unwrap();
        let run = theorem5_verify(&sys, None, &Sampling::default()).unwrap();
        assert_eq!(run.report.input_dim, 6);
        assert_eq!(run.report.closure_dim, 6);
        assert_eq!(run.report.verdict, Verdict::Reflexive);
        assert_eq!(run.check().status, Status::Pass);
        let l4 = isometry_commutation_check(&run.hardy, &run.closure).unwrap();
        assert_eq!(l4.status, Status::Pass, "{l4:?}");
        assert!(l4.residual < 1e-9);
    }

    #[test]
    fn positive_part_trivial_action() {
        let sys = WStarSystem::full(vec![1, 1], &tol()).unwrap();
        let run = theorem5_verify(&sys, None, &Sampling::default()).unwrap();
        assert_eq!(run.report.verdict, Verdict::Reflexive);
        let l4 = isometry_commutation_check(&run.hardy, &run.closure).unwrap();
        assert_eq!(l4.status, Status::Vacuous);
    }

    #[test]
    fn nest_dimensions() {
        let (_, dim) = nest_example(&[2, 1, 1], &[3, 2, 1], &tol()).unwrap();
        assert_eq!(dim, 11);
        let (_, dim) = nest_example(&[1, 1], &[1, 0], &tol()).unwrap();
        assert_eq!(dim, 3);
        let (sys, dim) = nest_example(&[3], &[5], &tol()).unwrap();
        assert_eq!(dim, 9);
        assert_eq!(sys.arveson_spectrum(), vec![0]);
        assert!(nest_example(&[1, 1], &[0, 1], &tol()).is_err());
        assert!(nest_example(&[1, 1], &[1, 1], &tol()).is_err());
        assert!(nest_example(&[1], &[1, 0], &tol()).is_err());
    }

    #[test]
    fn positive_part_nest() {
        let (sys, dim) = nest_example(&[2, 1, 1], &[3, 2, 1], &tol()).unwrap();
        let run = theorem5_verify(&sys, None, &Sampling::default()).unwrap();
        assert_eq!(run.report.input_dim, dim);
        assert_eq!(run.report.verdict, Verdict::Reflexive, "{:?}", run.report);
        assert!(isometry_commutation_check(&run.hardy, &run.closure)
            .unwrap()
            .passed());
    }

    #[test]
    fn corners_of_triangular_plus_full() {
        let ut = fixture_block(1, 2, &tol()).unwrap();
        let a = direct_sum(&ut, &StarAlgebra::full(2, tol())).unwrap();
        let carrier = OperatorAlgebraCarrier::new(a).unwrap();
        let q1 = crate::numsub::real_diag(&[1.0, 1.0, 0.0, 0.0]);
        let q2 = crate::numsub::real_diag(&[0.0, 0.0, 1.0, 1.0]);
        let v =
            combine_reflexive_corners(&carrier, &[q1.clone(), q2], &Sampling::default()).unwrap();
        assert_eq!(v.verdict, Verdict::Reflexive);
        assert!(v.agrees);
        let err = combine_reflexive_corners(&carrier, &[q1], &Sampling::default()).unwrap_err();
        assert!(err.to_string().contains("hypothesis iii"));
    }

    #[test]
    fn single_identity_corner() {
        let j = fixture_block(2, 3, &tol()).unwrap();
        let carrier = OperatorAlgebraCarrier::new(j).unwrap();
        let v = combine_reflexive_corners(&carrier, &[identity(3)], &Sampling::default()).unwrap();
        assert_eq!(v.verdict, Verdict::NonReflexive);
        assert_eq!(v.corners[0].closure_dim, v.direct.closure_dim);
        assert!(v.agrees);
    }

    #[test]
    fn noncommuting_projector_is_rejected() {
        let ut = fixture_block(1, 2, &tol()).unwrap();
        let carrier = OperatorAlgebraCarrier::new(ut).unwrap();
        let q1 = crate::numsub::real_diag(&[0.0, 1.0]);
        let q2 = crate::numsub::real_diag(&[1.0, 0.0]);
        let err = combine_reflexive_corners(&carrier, &[q1, q2], &Sampling::default()).unwrap_err();
        assert!(err.to_string().contains("hypothesis i "));
    }

    #[test]
    fn jordan_kernel_chain() {
        let mut jordan = CMatrix::zeros(4, 4);
        for i in 0..3 {
            jordan[(i, i + 1)] = crate::numsub::ONE;
        }
        let chain = kernel_chain(&jordan, &tol());
        assert_eq!(
            chain.iter().map(|s| s.dim()).collect::<Vec<_>>(),
            vec![1, 2, 3]
        );
    }
}
