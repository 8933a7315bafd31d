//! Finite-dimensional obstructions: no unitary lives in `M_n` for `n > 0`, abelian systems
//! carry trivial actions, and the corner extraction finds no normal partial isometries.
//!
//! A unitary `v ∈ M_n` would give `vᵏ ∈ M_{kn}` nonzero for every `k`, so the spectrum
//! would be infinite. The same argument applies to a normal partial isometry on its support.

use serde::Serialize;

use crate::algebra::is_abelian;
use crate::error::{Error, Result};
use crate::flow::WStarSystem;
use crate::numsub::random::{complex_gaussian, rng};
use crate::numsub::{hs_norm, identity, polar_partial_isometry, CMatrix};
use crate::report::Check;

/// Random combinations tried on top of the basis sweep.
const RANDOM_CANDIDATES: usize = 8;

/// `n₀ = min{n ∈ sp(α) : n > 0}`.
pub fn min_positive_spectrum(sys: &WStarSystem) -> Option<i64> {
    sys.arveson_spectrum().into_iter().find(|&n| n > 0)
}

/// Polar parts of the basis of `q·M_n·q` and of seeded random combinations.
fn polar_candidates(sys: &WStarSystem, n: i64, q: &CMatrix) -> Vec<CMatrix> {
    let basis = sys.spectral_subspace(n).elements();
    let mut raw: Vec<CMatrix> = basis.clone();
    let mut r = rng(0x5eed ^ n.unsigned_abs());
    if !basis.is_empty() {
        for _ in 0..RANDOM_CANDIDATES {
            let mut m = CMatrix::zeros(q.nrows(), q.ncols());
            for b in &basis {
                m += b * complex_gaussian(&mut r);
            }
            raw.push(m);
        }
    }
    raw.iter()
        .filter_map(|m| {
            let c = q * m * q;
            (hs_norm(&c) > sys.tol().rank_tol)
                .then(|| polar_partial_isometry(&c, sys.tol()).expect("square").0)
        })
        .collect()
}

/// A unitary element of `M_n`, if the search finds one.
pub fn find_unitary_in_subspace(sys: &WStarSystem, n: i64) -> Option<CMatrix> {
    let d = sys.ambient_dim();
    let tol = sys.tol().residual_tol;
    if n == 0 && sys.algebra().unital() {
        return Some(identity(d));
    }
    let mn = sys.spectral_subspace(n);
    polar_candidates(sys, n, &identity(d))
        .into_iter()
        .find(|w| {
            hs_norm(&(w.adjoint() * w - identity(d))) < tol && mn.residual(w).expect("shape") < tol
        })
}

/// Records that the large-scale hypotheses cannot be met by this system.
pub fn nogo_report(sys: &WStarSystem) -> Vec<Check> {
    let sp = sys.arveson_spectrum();
    let mut out = Vec::new();
    let symmetric = sp.iter().all(|n| sp.contains(&-n));
    out.push(Check::flag(
        "nogo.spectrum-finite-symmetric",
        symmetric && sp.contains(&0),
        format!("sp(alpha) = {sp:?}"),
    ));

    let positive: Vec<i64> = sp.iter().copied().filter(|&n| n > 0).collect();
    if positive.is_empty() {
        out.push(Check::vacuous(
            "nogo.no-unitary-in-positive-subspace",
            "no positive spectrum",
        ));
    } else {
        let found: Vec<i64> = positive
            .iter()
            .copied()
            .filter(|&n| find_unitary_in_subspace(sys, n).is_some())
            .collect();
        out.push(Check::flag(
            "nogo.no-unitary-in-positive-subspace",
            found.is_empty(),
            if found.is_empty() {
                format!("no unitary in M_n for n in {positive:?}")
            } else {
                format!("unitary found in M_n for n in {found:?}")
            },
        ));
    }

    if is_abelian(sys.algebra()) {
        out.push(Check::flag(
            "nogo.abelian-forces-trivial-action",
            sp == vec![0],
            format!("abelian algebra with sp(alpha) = {sp:?}"),
        ));
    } else {
        out.push(Check::vacuous(
            "nogo.abelian-forces-trivial-action",
            "algebra is not abelian",
        ));
    }
    out
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum CornerOutcome {
    /// `(1−f)M₊(1−f) = (1−f)M₀(1−f)` holds on the residual corner.
    Decomposed,
    /// The residual corner still carries positive spectrum.
    HypothesisAbsent,
}

#[derive(Debug, Clone)]
pub struct CornerDecomposition {
    /// Supports `e = w*w = ww*` of the accepted normal partial isometries.
    pub projections: Vec<CMatrix>,
    pub f: CMatrix,
    pub residual_projection: CMatrix,
    pub rounds: usize,
    /// `max ‖(1−f) m (1−f)‖` over basis elements `m` of `M_n`, `n > 0`.
    pub terminal_residual: f64,
    pub outcome: CornerOutcome,
}

impl CornerDecomposition {
    pub fn check(&self) -> Check {
        let details = format!(
            "{} projection(s) over {} round(s), terminal residual {:.3e}",
            self.projections.len(),
            self.rounds,
            self.terminal_residual
        );
        match self.outcome {
            CornerOutcome::Decomposed => Check::flag("nogo.corner-decomposition", true, details),
            CornerOutcome::HypothesisAbsent => Check::vacuous(
                "nogo.corner-decomposition",
                format!("hypothesis absent: {details}"),
            ),
        }
    }
}

/// Greedy extraction of orthogonal supports of normal partial isometries in `M_n`, one
/// round per positive spectral point, followed by the terminal identity on `1 − f`.
pub fn corner_decomposition(sys: &WStarSystem) -> Result<CornerDecomposition> {
    let positive: Vec<i64> = sys
        .arveson_spectrum()
        .into_iter()
        .filter(|&n| n > 0)
        .collect();
    if positive.is_empty() {
        return Err(Error::precondition(
            "corner decomposition needs positive spectrum",
        ));
    }
    let d = sys.ambient_dim();
    let tol = sys.tol().residual_tol;
    let m0 = sys.spectral_subspace(0);
    let mut f = CMatrix::zeros(d, d);
    let mut projections = Vec::new();
    let mut rounds = 0;
    for &n in &positive {
        rounds += 1;
        let q = identity(d) - &f;
        let mn = sys.spectral_subspace(n);
        let mut accepted: Vec<(usize, usize, CMatrix)> = polar_candidates(sys, n, &q)
            .into_iter()
            .enumerate()
            .filter_map(|(idx, w)| {
                let e = w.adjoint() * &w;
                let normal = hs_norm(&(&e - &w * w.adjoint())) < tol;
                let graded = mn.residual(&w).expect("shape") < tol;
                let in_fixed = m0.residual(&e).expect("shape") < tol;
                let rank = e.trace().re.round() as usize;
                (normal && graded && in_fixed && rank > 0).then_some((rank, idx, e))
            })
            .collect();
        accepted.sort_by(|a, b| b.0.cmp(&a.0).then(a.1.cmp(&b.1)));
        for (_, _, e) in accepted {
            if hs_norm(&(&e * &f)) < tol {
                f += &e;
                projections.push(e);
            }
        }
    }
    let residual_projection = identity(d) - &f;
    let mut terminal = 0.0f64;
    for &n in &positive {
        for m in sys.spectral_subspace(n).elements() {
            terminal = terminal.max(hs_norm(&(&residual_projection * m * &residual_projection)));
        }
    }
    Ok(CornerDecomposition {
        projections,
        f,
        residual_projection,
        rounds,
        terminal_residual: terminal,
        outcome: if terminal < tol {
            CornerOutcome::Decomposed
        } else {
            CornerOutcome::HypothesisAbsent
        },
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::{direct_sum, generate, StarAlgebra};
    use crate::flow::CircleAction;
    use crate::numsub::{matrix_unit, Tolerances};
    use crate::report::Status;

    fn tol() -> Tolerances {
        Tolerances::default()
    }

    #[test]
    fn min_positive_examples() {
        let full = WStarSystem::full(vec![0, 1, 2], &tol()).unwrap();
        assert_eq!(min_positive_spectrum(&full), Some(1));
        let gap = WStarSystem::full(vec![0, 0, 3], &tol()).unwrap();
        assert_eq!(min_positive_spectrum(&gap), Some(3));
        let triv = WStarSystem::full(vec![1, 1], &tol()).unwrap();
        assert_eq!(min_positive_spectrum(&triv), None);
    }

    #[test]
    fn unitary_search() {
        let full = WStarSystem::full(vec![0, 1, 2], &tol()).unwrap();
        assert!(find_unitary_in_subspace(&full, 0).is_some());
        assert!(find_unitary_in_subspace(&full, 1).is_none());
        assert!(find_unitary_in_subspace(&full, 2).is_none());
    }

    #[test]
    fn nogo_on_full3_and_diagonal() {
        let full = WStarSystem::full(vec![0, 1, 2], &tol()).unwrap();
        let checks = nogo_report(&full);
        assert!(checks.iter().all(|c| c.passed()));
        assert_eq!(checks[2].status, Status::Vacuous);
        let diag = WStarSystem::new(
            StarAlgebra::diagonal(3, tol()),
            CircleAction::new(vec![4, -1, 2]).unwrap(),
        )
        .unwrap();
        assert_eq!(diag.arveson_spectrum(), vec![0]);
        let checks = nogo_report(&diag);
        assert_eq!(checks[2].status, Status::Pass);
        assert_eq!(checks[1].status, Status::Vacuous);
    }

    #[test]
    fn corner_hypothesis_absent() {
        let g = generate(&[matrix_unit(3, 0, 2)], true, true, &tol()).unwrap();
        let sys = WStarSystem::new(g, CircleAction::new(vec![0, 0, 3]).unwrap()).unwrap();
        assert_eq!(sys.arveson_spectrum(), vec![-3, 0, 3]);
        let c = corner_decomposition(&sys).unwrap();
        assert!(c.projections.is_empty());
        assert_eq!(c.outcome, CornerOutcome::HypothesisAbsent);
        assert!((c.terminal_residual - 1.0).abs() < 1e-12);
    }

    #[test]
    fn corner_blockwise() {
        let m2 = StarAlgebra::full(2, tol());
        let block = WStarSystem::new(m2.clone(), CircleAction::new(vec![0, 1]).unwrap()).unwrap();
        let sum = direct_sum(&m2, &m2).unwrap();
        let sys = WStarSystem::new(sum, CircleAction::new(vec![0, 1, 0, 1]).unwrap()).unwrap();
        let whole = corner_decomposition(&sys).unwrap();
        let part = corner_decomposition(&block).unwrap();
        assert_eq!(whole.projections.len(), 2 * part.projections.len());
        assert_eq!(whole.outcome, part.outcome);
        assert!((whole.terminal_residual - part.terminal_residual).abs() < 1e-12);
    }

    #[test]
    fn corner_needs_positive_spectrum() {
        let sys = WStarSystem::full(vec![0, 0], &tol()).unwrap();
        assert!(matches!(
            corner_decomposition(&sys),
            Err(Error::Precondition(_))
        ));
    }
}
