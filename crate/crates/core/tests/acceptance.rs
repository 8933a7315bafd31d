mod common;

use std::collections::BTreeSet;
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::process::Command;
use std::time::Instant;

use rand::Rng;
use wflow::flow::{random_system, WStarSystem};
use wflow::gns::{canonical_state, gns, verify_standard_identities, GnsRealization};
use wflow::hardy::{
    approximation_bound, eigenvector_span_rank, find_unitary_in_subspace, nogo_report,
    power_approximation,
};
use wflow::numsub::random::{density, disc_point, rng, unitary};
use wflow::numsub::{identity, CMatrix, Tolerances};
use wflow::reflexivity::{
    combine_reflexive_corners, commutant_duality_check, corner_fixture, isometry_commutation_check,
    kernel_chain, nest_example, reflexive_closure, theorem5_verify, PositivePartRun, Sampling,
    Verdict,
};
use wflow::report::Status;

use common::{alg_lat_of_chain, carrier, jordan, upper_triangular_units};

type Outcome = Result<String, String>;
type Criterion<'a> = (&'static str, Box<dyn FnOnce() -> Outcome + 'a>);

fn ensure(ok: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if ok {
        Ok(())
    } else {
        Err(msg())
    }
}

fn tol() -> Tolerances {
    Tolerances::default()
}

fn full3() -> WStarSystem {
    WStarSystem::full(vec![0, 1, 2], &tol()).unwrap()
}

fn realize(sys: &WStarSystem, rho: Option<&CMatrix>) -> GnsRealization {
    gns(sys, &canonical_state(sys, rho).unwrap()).unwrap()
}

/// Systems shared by the grading, duality, commutant and no-go criteria.
struct Suite {
    named: Vec<(String, WStarSystem, Option<usize>)>,
    runs: Vec<PositivePartRun>,
}

fn suite() -> Suite {
    let mut named = vec![("full3".to_string(), full3(), Some(6))];
    let (nest, dim) = nest_example(&[2, 1, 1], &[3, 2, 1], &tol()).unwrap();
    named.push(("nest".into(), nest, Some(dim)));
    for seed in 0..20 {
        named.push((
            format!("random{seed}"),
            random_system(seed, 5, &tol()).unwrap(),
            None,
        ));
    }
    let runs = named
        .iter()
        .enumerate()
        .map(|(i, (_, sys, _))| theorem5_verify(sys, None, &Sampling::with_seed(i as u64)).unwrap())
        .collect();
    Suite { named, runs }
}

fn standard_form() -> Outcome {
    let start = Instant::now();
    let mut worst: f64 = 0.0;
    let mut non_tracial = 0;
    let mut max_dev: f64 = 0.0;
    for seed in 0..25u64 {
        let sys = random_system(1000 + seed, 6, &tol()).map_err(|e| e.to_string())?;
        let rho = density(&mut rng(seed), sys.ambient_dim());
        let g = realize(&sys, Some(&rho));
        for c in verify_standard_identities(&g) {
            ensure(c.status == Status::Pass, || {
                format!("seed {seed}: {} {}", c.anchor, c.details)
            })?;
            worst = worst.max(c.residual);
        }
        let dev = g.modular().delta_deviation();
        if dev > 1e-6 {
            non_tracial += 1;
        }
        max_dev = max_dev.max(dev);
    }
    let secs = start.elapsed().as_secs_f64();
    ensure(worst < 1e-8, || format!("max residual {worst:.3e}"))?;
    ensure(non_tracial >= 5, || {
        format!("only {non_tracial} non-tracial states")
    })?;
    ensure(max_dev > 0.1, || format!("max |Delta - I| = {max_dev:.3e}"))?;
    ensure(secs < 60.0, || format!("{secs:.1} s"))?;
    Ok(format!(
        "25 systems, max residual {worst:.2e}, {non_tracial} non-tracial, max |Delta - I| {max_dev:.2}, {secs:.1} s"
    ))
}

fn grading(s: &Suite) -> Outcome {
    for (name, sys, _) in &s.named {
        let total: usize = sys.grading().values().map(|x| x.dim()).sum();
        ensure(total == sys.algebra().dim(), || {
            format!("{name}: algebra {total} vs {}", sys.algebra().dim())
        })?;
        let g = realize(sys, None);
        let grades: BTreeSet<i64> = g.grades().iter().copied().collect();
        let h: usize = grades.iter().map(|&n| g.h_spectral_subspace(n).dim()).sum();
        ensure(h == g.dim(), || {
            format!("{name}: Hilbert {h} vs {}", g.dim())
        })?;
    }
    let sys = full3();
    let dims: Vec<usize> = (-2..=2).map(|n| sys.spectral_subspace(n).dim()).collect();
    ensure(dims == [1, 2, 3, 2, 1], || format!("full3 grades {dims:?}"))?;
    Ok(format!("{} systems, full3 grades {dims:?}", s.named.len()))
}

fn positive_part(s: &Suite) -> Outcome {
    let mut worst: f64 = 0.0;
    for ((name, _, expected), run) in s.named.iter().zip(&s.runs) {
        let r = &run.report;
        ensure(r.verdict == Verdict::Reflexive, || {
            format!("{name}: verdict {:?}", r.verdict)
        })?;
        ensure(r.closure_dim == r.input_dim, || {
            format!("{name}: closure {} vs {}", r.closure_dim, r.input_dim)
        })?;
        if let Some(d) = expected {
            ensure(r.input_dim == *d, || {
                format!("{name}: dim M+ = {} vs {d}", r.input_dim)
            })?;
        }
        ensure(run.two_sided_residual < 1e-7, || {
            format!("{name}: two-sided {:.3e}", run.two_sided_residual)
        })?;
        worst = worst.max(run.two_sided_residual);
    }
    Ok(format!(
        "{} systems reflexive, dim M+ full3 {} nest {}, max two-sided residual {worst:.2e}",
        s.runs.len(),
        s.runs[0].report.input_dim,
        s.runs[1].report.input_dim
    ))
}

fn oracle() -> Outcome {
    let t = tol();
    let cases = [
        (
            "jordan4",
            vec![jordan(4)],
            jordan(4),
            4,
            10,
            Verdict::NonReflexive,
        ),
        (
            "span{I,N2}",
            vec![jordan(2)],
            jordan(2),
            2,
            3,
            Verdict::NonReflexive,
        ),
        (
            "ut3",
            upper_triangular_units(3),
            jordan(3),
            6,
            6,
            Verdict::Reflexive,
        ),
    ];
    let mut out = Vec::new();
    for (name, gens, chain_op, dim, closure_dim, verdict) in cases {
        let a = carrier(&gens);
        let d = a.ambient_dim();
        let (closure, r) =
            reflexive_closure(&a, &Sampling::default()).map_err(|e| e.to_string())?;
        let brute = alg_lat_of_chain(&kernel_chain(&chain_op, &t), d);
        ensure(a.dim() == dim, || format!("{name}: dim {}", a.dim()))?;
        ensure(
            r.closure_dim == closure_dim && brute.dim() == closure_dim,
            || {
                format!(
                    "{name}: closure {} oracle {} expected {closure_dim}",
                    r.closure_dim,
                    brute.dim()
                )
            },
        )?;
        ensure(r.verdict == verdict, || {
            format!("{name}: verdict {:?}", r.verdict)
        })?;
        let dist = closure.compare(&brute).map_err(|e| e.to_string())?.distance;
        ensure(dist < 1e-8, || {
            format!("{name}: distance to oracle {dist:.3e}")
        })?;
        out.push(format!("{name} {dim}->{closure_dim}"));
    }
    Ok(out.join(", "))
}

fn duality(s: &Suite) -> Outcome {
    let mut worst: f64 = 0.0;
    for ((name, _, _), run) in s.named.iter().zip(&s.runs) {
        let c = &commutant_duality_check(&run.hardy).map_err(|e| e.to_string())?[0];
        ensure(c.status == Status::Pass && c.residual < 1e-8, || {
            format!("{name}: {} {:.3e}", c.details, c.residual)
        })?;
        worst = worst.max(c.residual);
    }
    Ok(format!(
        "{} systems, max distance {worst:.2e}",
        s.runs.len()
    ))
}

fn commuting_isometries(s: &Suite) -> Outcome {
    let mut worst: f64 = 0.0;
    let mut nonvacuous = 0;
    for ((name, _, _), run) in s.named.iter().zip(&s.runs) {
        let c = isometry_commutation_check(&run.hardy, &run.closure).map_err(|e| e.to_string())?;
        ensure(c.passed() && c.residual < 1e-7, || {
            format!("{name}: {} {:.3e}", c.details, c.residual)
        })?;
        if c.status == Status::Pass {
            nonvacuous += 1;
        }
        worst = worst.max(c.residual);
    }
    Ok(format!(
        "{} systems ({nonvacuous} with isometries), max residual {worst:.2e}",
        s.runs.len()
    ))
}

fn certificates() -> Outcome {
    let start = Instant::now();
    let t = tol();
    let mut count = 0;
    for seed in 0..10u64 {
        let mut r = rng(500 + seed);
        let size = r.random_range(2..=8usize);
        let w = unitary(&mut r, size);
        for n in 1..=5 {
            for eps in [0.1, 0.25, 0.5, 0.75] {
                let c = power_approximation(&w, n, eps, &t).map_err(|e| e.to_string())?;
                ensure(c.valid(), || format!("seed {seed} n {n} eps {eps}: {c:?}"))?;
                count += 1;
            }
        }
    }
    let c = power_approximation(&identity(3), 2, 0.5, &t).map_err(|e| e.to_string())?;
    ensure((c.achieved_error - 1.0 / 7.0).abs() < 1e-10, || {
        format!("anchor error {}", c.achieved_error)
    })?;
    ensure((c.bound - 1.0 / 3.0).abs() < 1e-12, || {
        format!("anchor bound {}", c.bound)
    })?;
    ensure(
        (approximation_bound(2, 0.5) - 1.0 / 3.0).abs() < 1e-12,
        || "bound formula".into(),
    )?;
    let secs = start.elapsed().as_secs_f64();
    ensure(secs < 30.0, || format!("{secs:.1} s"))?;
    Ok(format!(
        "{count} certificates, anchor error {:.6} bound {:.6}, {secs:.1} s",
        c.achieved_error, c.bound
    ))
}

fn span_rank() -> Outcome {
    let t = tol();
    for n in 1..=12usize {
        let mut r = rng(n as u64);
        let lambdas: Vec<_> = (0..=n).map(|_| disc_point(&mut r, 0.95)).collect();
        let rank = eigenvector_span_rank(&lambdas, n, &t).map_err(|e| e.to_string())?;
        ensure(rank == n + 1, || format!("N = {n}: rank {rank}"))?;
    }
    Ok("rank N+1 for N = 1..12".into())
}

fn nogo(s: &Suite) -> Outcome {
    let mut systems: Vec<(String, WStarSystem)> = s
        .named
        .iter()
        .map(|(n, sys, _)| (n.clone(), sys.clone()))
        .collect();
    for seed in 0..25u64 {
        systems.push((
            format!("random6-{seed}"),
            random_system(1000 + seed, 6, &tol()).unwrap(),
        ));
    }
    let mut anchors = BTreeSet::new();
    for (name, sys) in &systems {
        for c in nogo_report(sys) {
            ensure(c.passed(), || format!("{name}: {} {}", c.anchor, c.details))?;
            anchors.insert(c.anchor.clone());
        }
        let sp = sys.arveson_spectrum();
        for n in sp.iter().filter(|&&n| n > 0) {
            ensure(find_unitary_in_subspace(sys, *n).is_none(), || {
                format!("{name}: unitary in M_{n}")
            })?;
        }
    }
    Ok(format!(
        "{} systems, anchors {}",
        systems.len(),
        anchors.into_iter().collect::<Vec<_>>().join(" ")
    ))
}

fn corners() -> Outcome {
    let t = tol();
    let mut verdicts = Vec::new();
    for seed in 0..10u64 {
        let (a, qs) = corner_fixture(seed, &t).map_err(|e| e.to_string())?;
        let v = combine_reflexive_corners(&a, &qs, &Sampling::with_seed(seed))
            .map_err(|e| e.to_string())?;
        ensure(v.agrees, || {
            format!(
                "seed {seed}: {:?} vs direct {:?}",
                v.verdict, v.direct.verdict
            )
        })?;
        verdicts.push(format!("{:?}", v.verdict));
    }
    Ok(format!("10 fixtures agree ({})", verdicts.join(" ")))
}

fn cli() -> Outcome {
    let bin = env!("CARGO_BIN_EXE_wflow");
    let run = |args: &[&str]| -> Result<(i32, Vec<u8>), String> {
        let out = Command::new(bin)
            .args(args)
            .output()
            .map_err(|e| e.to_string())?;
        Ok((out.status.code().unwrap_or(-1), out.stdout))
    };
    let (code, _) = run(&["verify", "--example", "full3", "--suite", "all"])?;
    ensure(code == 0, || format!("full3 all exit {code}"))?;
    let (code, _) = run(&["verify", "--example", "jordan4", "--suite", "reflexivity"])?;
    ensure(code == 0, || format!("jordan4 reflexivity exit {code}"))?;
    let dir = std::env::temp_dir().join(format!("wflow-acceptance-{}", std::process::id()));
    std::fs::create_dir_all(&dir).map_err(|e| e.to_string())?;
    let bad = dir.join("bad.json");
    std::fs::write(&bad, "{\"version\": 1, \"dimension\": \"three\"}")
        .map_err(|e| e.to_string())?;
    let (code, _) = run(&["verify", "--spec", bad.to_str().unwrap(), "--suite", "all"])?;
    ensure(code == 2, || format!("malformed spec exit {code}"))?;
    let args = [
        "verify",
        "--example",
        "random",
        "--seed",
        "7",
        "--suite",
        "all",
    ];
    let (c1, a) = run(&args)?;
    let (c2, b) = run(&args)?;
    std::fs::remove_dir_all(&dir).ok();
    ensure(c1 == c2 && a == b && !a.is_empty(), || {
        "reports differ for identical seeds".into()
    })?;
    Ok("exit codes 0, 0, 2 and byte-identical reports".into())
}

fn guarded(f: impl FnOnce() -> Outcome) -> Outcome {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(r) => r,
        Err(p) => Err(p
            .downcast_ref::<String>()
            .cloned()
            .or_else(|| p.downcast_ref::<&str>().map(|s| s.to_string()))
            .unwrap_or_else(|| "panic".into())),
    }
}

fn main() {
    let shared = catch_unwind(suite).ok();
    let s = shared.as_ref();
    let need =
        |f: fn(&Suite) -> Outcome| move || s.map_or(Err("suite construction failed".into()), f);
    let criteria: Vec<Criterion> = vec![
        ("standard-form identities", Box::new(standard_form)),
        ("grading accounting", Box::new(need(grading))),
        ("positive part reflexive", Box::new(need(positive_part))),
        ("closure oracle agreement", Box::new(oracle)),
        ("commutant duality", Box::new(need(duality))),
        (
            "closure commutes with isometries",
            Box::new(need(commuting_isometries)),
        ),
        ("resolvent certificates", Box::new(certificates)),
        ("eigenvector span rank", Box::new(span_rank)),
        ("no-go suite", Box::new(need(nogo))),
        ("corner combination", Box::new(corners)),
        ("command line", Box::new(cli)),
    ];
    let mut failed = 0;
    for (i, (name, f)) in criteria.into_iter().enumerate() {
        let start = Instant::now();
        let outcome = guarded(f);
        let secs = start.elapsed().as_secs_f64();
        match outcome {
            Ok(msg) => println!("PASS {:>2} {name}: {msg} [{secs:.1} s]", i + 1),
            Err(msg) => {
                failed += 1;
                println!("FAIL {:>2} {name}: {msg} [{secs:.1} s]", i + 1);
            }
        }
    }
    println!("{} of 11 criteria passed", 11 - failed);
    if failed > 0 {
        std::process::exit(1);
    }
}
