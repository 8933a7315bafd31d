mod common;

use proptest::prelude::*;

use wflow::algebra::{bicommutant_check, commutant, generate};
use wflow::cli::{generate_example, parse_spec_str, run_suite, ExampleParams, Suite};
use wflow::flow::random_system;
use wflow::gns::{canonical_state, gns, verify_standard_identities};
use wflow::hardy::{build_hardy, eigenvector_span_rank, hardy_checks, power_approximation};
use wflow::numsub::random::{complex_matrix, density, disc_point, rng, unitary};
use wflow::numsub::{
    hs_norm, orthonormalize, polar_partial_isometry, subspace_compare, CMatrix, Relation, Subspace,
    Tolerances, C64,
};
use wflow::reflexivity::{
    block_upper_triangular, combine_reflexive_corners, corner_fixture, reflexive_closure, Sampling,
    Verdict,
};

use common::{carrier, jordan};

fn tol() -> Tolerances {
    Tolerances::default()
}

fn config(cases: u32) -> ProptestConfig {
    ProptestConfig {
        cases,
        failure_persistence: None,
        ..ProptestConfig::default()
    }
}

fn random_family(seed: u64, d: usize, count: usize) -> Vec<CMatrix> {
    let mut r = rng(seed);
    (0..count).map(|_| complex_matrix(&mut r, d, d)).collect()
}

proptest! {
    #![proptest_config(config(64))]

    #[test]
    fn orthonormalize_reconstructs_inputs(seed in any::<u64>(), d in 1usize..5, count in 1usize..6) {
        let mut family = random_family(seed, d, count);
        family.push(&family[0] * C64::new(2.0, -1.0));
        let space = orthonormalize(&family, (d, d), &tol()).unwrap();
        prop_assert!(space.dim() <= count.min(d * d));
        for m in &family {
            prop_assert!(space.residual(m).unwrap() < tol().residual_tol * hs_norm(m).max(1.0));
        }
    }

    #[test]
    fn polar_parts_are_partial_isometries(seed in any::<u64>(), d in 2usize..9, rank in 1usize..9) {
        let mut r = rng(seed);
        let rank = rank.min(d);
        let a = complex_matrix(&mut r, d, rank) * complex_matrix(&mut r, rank, d);
        let (w, pos) = polar_partial_isometry(&a, &tol()).unwrap();
        let p = w.adjoint() * &w;
        prop_assert!(hs_norm(&(&a - &w * pos)) <= tol().residual_tol * hs_norm(&a));
        prop_assert!(hs_norm(&(&p * &p - &p)) <= tol().residual_tol);
    }

    #[test]
    fn subspace_order_is_reflexive_and_antisymmetric(seed in any::<u64>(), n in 2usize..7, k in 1usize..4) {
        let mut r = rng(seed);
        let big = complex_matrix(&mut r, n, k + 1);
        let small = big.columns(0, k).into_owned();
        let s = Subspace::from_columns(&small, tol());
        let b = Subspace::from_columns(&big, tol());
        prop_assert_eq!(subspace_compare(&s, &s).unwrap().relation, Relation::Equal);
        let forward = subspace_compare(&s, &b).unwrap().relation;
        let backward = subspace_compare(&b, &s).unwrap().relation;
        if s.dim() < b.dim() {
            prop_assert_eq!(forward, Relation::FirstInSecond);
            prop_assert_eq!(backward, Relation::SecondInFirst);
        } else {
            prop_assert_eq!(forward, Relation::Equal);
            prop_assert_eq!(backward, Relation::Equal);
        }
    }
}

proptest! {
    #![proptest_config(config(25))]

    #[test]
    fn star_generated_algebras_equal_their_bicommutant(seed in any::<u64>(), d in 1usize..7, count in 1usize..3) {
        let family: Vec<CMatrix> = random_family(seed, d, count)
            .into_iter()
            .map(|m| {
                let mut sparse = m;
                for i in 0..d {
                    for j in 0..d {
                        if (i * 7 + j * 3 + seed as usize).is_multiple_of(3) && i != j {
                            sparse[(i, j)] = C64::new(0.0, 0.0);
                        }
                    }
                }
                sparse
            })
            .collect();
        let a = generate(&family, true, true, &tol()).unwrap();
        let report = bicommutant_check(&a).unwrap();
        prop_assert!(report.equal, "distance {}", report.distance);
        let again = generate(&a.basis(), true, true, &tol()).unwrap();
        prop_assert_eq!(again.space().compare(a.space()).unwrap().relation, Relation::Equal);
    }

    #[test]
    fn commutant_reverses_inclusion(seed in any::<u64>(), d in 2usize..6) {
        let family = random_family(seed, d, 2);
        let small = generate(&family[..1], true, true, &tol()).unwrap();
        let big = generate(&family, true, true, &tol()).unwrap();
        let cs = commutant(&small).unwrap();
        let cb = commutant(&big).unwrap();
        let rel = cb.space().compare(cs.space()).unwrap().relation;
        prop_assert!(matches!(rel, Relation::Equal | Relation::FirstInSecond));
    }

    #[test]
    fn grading_is_exhaustive_and_symmetric(seed in any::<u64>()) {
        let sys = random_system(seed, 6, &tol()).unwrap();
        let total: usize = sys.grading().values().map(|s| s.dim()).sum();
        prop_assert_eq!(total, sys.algebra().dim());
        let sp = sys.arveson_spectrum();
        let mut neg: Vec<i64> = sp.iter().map(|n| -n).collect();
        neg.sort();
        prop_assert_eq!(sp, neg);
        let mut r = rng(seed ^ 1);
        let m = complex_matrix(&mut r, sys.ambient_dim(), sys.ambient_dim());
        for n in -4..=4 {
            let exact = sys.spectral_projection(n, &m);
            let averaged = sys.spectral_projection_averaged(n, &m);
            prop_assert!(hs_norm(&(exact - averaged)) < 1e-12 * hs_norm(&m).max(1.0));
        }
        for k in 0..16 {
            let z = wflow::numsub::unit(0.37 * k as f64 + 0.1);
            for b in sys.algebra().basis() {
                let moved = sys.act(z, &b).unwrap();
                prop_assert!(sys.algebra().residual(&moved).unwrap() < tol().residual_tol);
            }
        }
    }

    #[test]
    fn standard_form_and_hardy_identities_hold(seed in any::<u64>(), tracial in any::<bool>()) {
        let sys = random_system(seed, 5, &tol()).unwrap();
        let rho = (!tracial).then(|| density(&mut rng(seed), sys.ambient_dim()));
        let g = gns(&sys, &canonical_state(&sys, rho.as_ref()).unwrap()).unwrap();
        prop_assert_eq!(g.dim(), sys.algebra().dim());
        for c in verify_standard_identities(&g) {
            prop_assert!(c.passed(), "{} {}", c.anchor, c.details);
        }
        for n in -4..=4 {
            let h = g.h_spectral_subspace(n).dim();
            prop_assert_eq!(h, sys.spectral_subspace(n).dim());
            prop_assert_eq!(h, g.commutant_spectral_subspace(n).dim());
        }
        for c in hardy_checks(&build_hardy(&g).unwrap()) {
            prop_assert!(c.passed(), "{} {}", c.anchor, c.details);
        }
    }

    #[test]
    fn resolvent_certificates_hold(seed in any::<u64>(), size in 2usize..9, n in 1usize..6, eps in 0.05f64..0.95) {
        let w = unitary(&mut rng(seed), size);
        let c = power_approximation(&w, n, eps, &tol()).unwrap();
        prop_assert!(c.valid(), "{:?}", c);
    }

    #[test]
    fn distinct_disc_points_span(seed in any::<u64>(), n in 1usize..10, extra in 0usize..3) {
        let mut r = rng(seed);
        let lambdas: Vec<C64> = (0..n + 1 + extra).map(|_| disc_point(&mut r, 0.9)).collect();
        prop_assert_eq!(eigenvector_span_rank(&lambdas, n, &tol()).unwrap(), n + 1);
    }
}

proptest! {
    #![proptest_config(config(12))]

    #[test]
    fn closure_contains_true_alglat(seed in any::<u64>(), d in 2usize..5, budget in 4usize..40) {
        let a = carrier(&[jordan(d)]);
        let sampling = Sampling { seed, max_samples: Some(budget.max(12)), window: 12 };
        let (closure, report) = reflexive_closure(&a, &sampling).unwrap();
        let nest = block_upper_triangular(&vec![1; d], &tol()).unwrap();
        let rel = nest.compare(&closure).unwrap().relation;
        prop_assert!(matches!(rel, Relation::Equal | Relation::FirstInSecond));
        prop_assert!(report.containment_residual < tol().subspace_tol);
        prop_assert!(report.closure_dim >= report.input_dim);
        prop_assert!(report.verdict != Verdict::Reflexive);
    }

    #[test]
    fn closure_runs_are_deterministic(seed in any::<u64>()) {
        let (a, qs) = corner_fixture(seed % 1000, &tol()).unwrap();
        let s = Sampling::with_seed(seed);
        let (_, r1) = reflexive_closure(&a, &s).unwrap();
        let (_, r2) = reflexive_closure(&a, &s).unwrap();
        prop_assert_eq!(serde_json::to_string(&r1).unwrap(), serde_json::to_string(&r2).unwrap());
        let v = combine_reflexive_corners(&a, &qs, &s).unwrap();
        prop_assert!(v.agrees);
    }

    #[test]
    fn reports_are_stable_and_specs_reparse(seed in any::<u64>()) {
        let params = ExampleParams { seed, ..ExampleParams::default() };
        let spec = generate_example("random", &params).unwrap();
        let text = spec.to_canonical_json();
        prop_assert_eq!(parse_spec_str(&text).unwrap().to_canonical_json(), text);
        let a = run_suite(&spec, Suite::Identities, "random", None).unwrap();
        let b = run_suite(&spec, Suite::Identities, "random", None).unwrap();
        prop_assert_eq!(a.to_json(), b.to_json());
        prop_assert_eq!(a.exit_code(), 0);
    }
}
