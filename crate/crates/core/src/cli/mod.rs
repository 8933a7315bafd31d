//! Spec files, named examples and verification suites behind the `wflow` binary.

mod spec;

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::str::FromStr;

use serde::Serialize;

pub use spec::{
    load_spec, matrix_to_rows, parse_spec, parse_spec_str, rows_to_matrix, save_spec, AlgebraSpec,
    InputSpec, MatrixRows, SystemSpec, SPEC_VERSION,
};

use crate::error::{Error, Result};
use crate::flow::{random_generators, WStarSystem};
use crate::gns::{canonical_state, gns, verify_standard_identities, GnsRealization};
use crate::hardy::{
    build_hardy, corner_decomposition, eigenvector_span_rank, hardy_checks, nogo_report,
    power_approximation,
};
use crate::numsub::random::{disc_point, rng};
use crate::numsub::{matrix_unit, unit, CMatrix, Tolerances};
use crate::reflexivity::{
    commutant_duality_check, isometry_commutation_check, nest_example, reflexive_closure,
    theorem5_verify, Sampling, Verdict,
};
use crate::report::{Check, Status};

/// Environment variable overriding `residual_tol`.
pub const TOL_ENV: &str = "WFLOW_TOL";

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Suite {
    Identities,
    Hardy,
    Reflexivity,
    Approximation,
    Nogo,
    All,
}

impl Suite {
    pub const NAMES: [&'static str; 6] = [
        "identities",
        "hardy",
        "reflexivity",
        "approximation",
        "nogo",
        "all",
    ];

    pub fn name(self) -> &'static str {
        match self {
            Suite::Identities => "identities",
            Suite::Hardy => "hardy",
            Suite::Reflexivity => "reflexivity",
            Suite::Approximation => "approximation",
            Suite::Nogo => "nogo",
            Suite::All => "all",
        }
    }

    fn includes(self, other: Suite) -> bool {
        self == Suite::All || self == other
    }
}

impl FromStr for Suite {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Ok(match s {
            "identities" => Suite::Identities,
            "hardy" => Suite::Hardy,
            "reflexivity" => Suite::Reflexivity,
            "approximation" => Suite::Approximation,
            "nogo" => Suite::Nogo,
            "all" => Suite::All,
            _ => {
                return Err(Error::input(format!(
                    "unknown suite {s:?}; expected one of {}",
                    Suite::NAMES.join(", ")
                )))
            }
        })
    }
}

/// Parameters of the named examples; unused fields are ignored.
#[derive(Debug, Clone, PartialEq)]
pub struct ExampleParams {
    pub seed: u64,
    pub blocks: Vec<usize>,
    pub weights: Vec<i64>,
    pub max_dim: usize,
}

impl Default for ExampleParams {
    fn default() -> Self {
        ExampleParams {
            seed: 0,
            blocks: vec![2, 1, 1],
            weights: vec![3, 2, 1],
            max_dim: 5,
        }
    }
}

pub const EXAMPLE_NAMES: [&str; 4] = ["full3", "nest", "jordan4", "random"];

fn matrix_units(d: usize) -> Vec<CMatrix> {
    (0..d)
        .flat_map(|i| (0..d).map(move |j| matrix_unit(d, i, j)))
        .collect()
}

/// Named example as a spec document; deterministic in `params`.
pub fn generate_example(name: &str, params: &ExampleParams) -> Result<InputSpec> {
    let tol = Tolerances::default();
    match name {
        "full3" => {
            let sys = WStarSystem::full(vec![0, 1, 2], &tol)?;
            Ok(InputSpec::System(SystemSpec::from_system(
                &sys,
                &matrix_units(3),
                params.seed,
            )))
        }
        "nest" => {
            let (sys, _) = nest_example(&params.blocks, &params.weights, &tol)?;
            let d = sys.ambient_dim();
            Ok(InputSpec::System(SystemSpec::from_system(
                &sys,
                &matrix_units(d),
                params.seed,
            )))
        }
        "jordan4" => {
            let mut j = CMatrix::zeros(4, 4);
            for i in 0..3 {
                j[(i, i + 1)] = crate::numsub::ONE;
            }
            Ok(InputSpec::Algebra(AlgebraSpec {
                version: SPEC_VERSION,
                kind: "algebra".into(),
                dimension: 4,
                generators: vec![matrix_to_rows(&j)],
                expected_verdict: Some(Verdict::NonReflexive),
                expected_closure_dim: Some(10),
                tolerances: None,
                seed: params.seed,
            }))
        }
        "random" => {
            let (weights, generators) = random_generators(params.seed, params.max_dim)?;
            Ok(InputSpec::System(SystemSpec {
                version: SPEC_VERSION,
                dimension: weights.len(),
                weights,
                generators: generators.iter().map(matrix_to_rows).collect(),
                state_density: None,
                tolerances: None,
                seed: params.seed,
            }))
        }
        other => Err(Error::input(format!(
            "unknown example {other:?}; expected one of {}",
            EXAMPLE_NAMES.join(", ")
        ))),
    }
}

/// Reads `WFLOW_TOL` into a `residual_tol` override.
pub fn tolerance_override() -> Result<Option<f64>> {
    match std::env::var(TOL_ENV) {
        Err(_) => Ok(None),
        Ok(v) => match v.trim().parse::<f64>() {
            Ok(x) if x.is_finite() && x > 0.0 => Ok(Some(x)),
            _ => Err(Error::input(format!(
                "{TOL_ENV}={v:?} is not a positive number"
            ))),
        },
    }
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize)]
pub struct Summary {
    pub pass: usize,
    pub fail: usize,
    pub vacuous: usize,
    pub inconclusive: usize,
}

#[derive(Debug, Clone, Serialize)]
pub struct Report {
    pub suite: Suite,
    pub source: String,
    pub seed: u64,
    pub records: Vec<Check>,
    pub verdicts: BTreeMap<String, Verdict>,
    pub summary: Summary,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub wall_time_s: Option<f64>,
}

impl Report {
    fn new(suite: Suite, source: String, seed: u64) -> Self {
        Report {
            suite,
            source,
            seed,
            records: Vec::new(),
            verdicts: BTreeMap::new(),
            summary: Summary::default(),
            wall_time_s: None,
        }
    }

    fn finish(mut self) -> Self {
        self.records.sort_by(|a, b| a.anchor.cmp(&b.anchor));
        let mut s = Summary::default();
        for r in &self.records {
            match r.status {
                Status::Pass => s.pass += 1,
                Status::Fail => s.fail += 1,
                Status::Vacuous => s.vacuous += 1,
                Status::Inconclusive => s.inconclusive += 1,
            }
        }
        self.summary = s;
        self
    }

    pub fn passed(&self) -> bool {
        self.summary.fail == 0
    }

    /// Process exit code: 0 without failures, 1 otherwise.
    pub fn exit_code(&self) -> i32 {
        if self.passed() {
            0
        } else {
            1
        }
    }

    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("serializable");
        s.push('\n');
        s
    }

    pub fn to_text(&self) -> String {
        let width = self
            .records
            .iter()
            .map(|r| r.anchor.len())
            .max()
            .unwrap_or(6)
            .max(6);
        let mut out = String::new();
        let _ = writeln!(
            out,
            "suite {} on {} (seed {})",
            self.suite.name(),
            self.source,
            self.seed
        );
        let _ = writeln!(
            out,
            "{:<width$}  {:<12}  {:>10}  details",
            "anchor", "status", "residual"
        );
        for r in &self.records {
            let status = serde_json::to_value(r.status).expect("serializable");
            let _ = writeln!(
                out,
                "{:<width$}  {:<12}  {:>10.3e}  {}",
                r.anchor,
                status.as_str().unwrap_or_default(),
                r.residual,
                r.details
            );
        }
        for (name, v) in &self.verdicts {
            let v = serde_json::to_value(v).expect("serializable");
            let _ = writeln!(out, "verdict {name}: {}", v.as_str().unwrap_or_default());
        }
        let s = &self.summary;
        let _ = writeln!(
            out,
            "{} pass, {} fail, {} vacuous, {} inconclusive",
            s.pass, s.fail, s.vacuous, s.inconclusive
        );
        if let Some(t) = self.wall_time_s {
            let _ = writeln!(out, "wall time {t:.3} s");
        }
        out
    }
}

const APPROX_EPS: [f64; 4] = [0.1, 0.25, 0.5, 0.75];
const SPAN_POINTS: usize = 12;

fn grading_checks(sys: &WStarSystem) -> Vec<Check> {
    let total: usize = sys.grading().values().map(|s| s.dim()).sum();
    let dims: Vec<String> = sys
        .grading()
        .iter()
        .map(|(n, s)| format!("{n}:{}", s.dim()))
        .collect();
    let products = sys.graded_product_check();
    vec![
        Check::flag(
            "grading.algebra-dimensions",
            total == sys.algebra().dim(),
            format!(
                "sum of dim M_n = {total}, dim M = {} ({})",
                sys.algebra().dim(),
                dims.join(" ")
            ),
        ),
        Check::below(
            "grading.graded-products",
            products.max_residual,
            sys.tol().residual_tol,
            format!("{} pairs M_m M_n in M_(m+n)", products.pairs_checked),
        ),
    ]
}

fn approximation_checks(g: &GnsRealization, seed: u64) -> Result<Vec<Check>> {
    let tol = *g.tol();
    let w = g.implementing_unitary(unit(0.7))?;
    let mut out = Vec::new();
    for n in 1..=5 {
        let mut worst = 0.0f64;
        let mut ok = true;
        for eps in APPROX_EPS {
            let c = power_approximation(&w, n, eps, &tol)?;
            ok &= c.valid();
            worst = worst.max(c.achieved_error / c.bound);
        }
        let mut check = Check::flag(
            format!("approximation.power-from-resolvents.n{n}"),
            ok,
            format!("worst achieved/bound = {worst:.4} over eps in {APPROX_EPS:?}"),
        );
        check.residual = worst;
        out.push(check);
    }
    let mut r = rng(seed ^ 0x5a5a);
    let lambdas: Vec<_> = (0..=SPAN_POINTS)
        .map(|_| disc_point(&mut r, 0.95))
        .collect();
    let rank = eigenvector_span_rank(&lambdas, SPAN_POINTS, &tol)?;
    out.push(Check::flag(
        "approximation.eigenvector-span-rank",
        rank == SPAN_POINTS + 1,
        format!(
            "rank {rank} for {} points, N = {SPAN_POINTS}",
            lambdas.len()
        ),
    ));
    Ok(out)
}

fn system_suite(spec: &SystemSpec, suite: Suite, report: &mut Report) -> Result<()> {
    let sys = spec.build()?;
    let density = spec.density();
    let state = canonical_state(&sys, density.as_ref())?;
    let g = gns(&sys, &state)?;
    if suite.includes(Suite::Identities) {
        report.records.extend(verify_standard_identities(&g));
        report.records.extend(grading_checks(&sys));
    }
    if suite.includes(Suite::Hardy) {
        report.records.extend(hardy_checks(&build_hardy(&g)?));
    }
    if suite.includes(Suite::Reflexivity) {
        let run = theorem5_verify(&sys, density.as_ref(), &Sampling::with_seed(spec.seed))?;
        report.records.push(run.check());
        report.records.extend(commutant_duality_check(&run.hardy)?);
        report
            .records
            .push(isometry_commutation_check(&run.hardy, &run.closure)?);
        report
            .verdicts
            .insert("positive_part".into(), run.report.verdict);
    }
    if suite.includes(Suite::Approximation) {
        report.records.extend(approximation_checks(&g, spec.seed)?);
    }
    if suite.includes(Suite::Nogo) {
        report.records.extend(nogo_report(&sys));
        report.records.push(match corner_decomposition(&sys) {
            Ok(c) => c.check(),
            Err(Error::Precondition(m)) => Check::vacuous("nogo.corner-decomposition", m),
            Err(e) => return Err(e),
        });
    }
    Ok(())
}

fn algebra_suite(spec: &AlgebraSpec, suite: Suite, report: &mut Report) -> Result<()> {
    if !suite.includes(Suite::Reflexivity) {
        return Err(Error::input(format!(
            "suite {:?} needs a system spec; algebra specs support reflexivity only",
            suite.name()
        )));
    }
    let a = spec.build()?;
    let (_, r) = reflexive_closure(&a, &Sampling::with_seed(spec.seed))?;
    let mut problems = Vec::new();
    if let Some(v) = spec.expected_verdict {
        if v != r.verdict {
            problems.push(format!("expected verdict {v:?}"));
        }
    }
    if let Some(d) = spec.expected_closure_dim {
        if d != r.closure_dim {
            problems.push(format!("expected closure dim {d}"));
        }
    }
    let details = format!(
        "dim A = {}, closure dim = {}, {} witnesses, {} samples, verdict {:?}",
        r.input_dim, r.closure_dim, r.witness_count, r.samples_used, r.verdict
    );
    let mut check = Check::flag(
        "reflexivity.closure-matches-expectation",
        problems.is_empty(),
        if problems.is_empty() {
            details
        } else {
            format!("{details}; {}", problems.join(", "))
        },
    );
    check.residual = r.containment_residual;
    if problems.is_empty() && r.verdict == Verdict::Inconclusive {
        check.status = Status::Inconclusive;
    }
    report.records.push(check);
    report.verdicts.insert("algebra".into(), r.verdict);
    Ok(())
}

/// Runs `suite` on a parsed input; `residual_tol` replaces the document's value when set.
pub fn run_suite(
    input: &InputSpec,
    suite: Suite,
    source: &str,
    residual_tol: Option<f64>,
) -> Result<Report> {
    let mut input = input.clone();
    if let Some(t) = residual_tol {
        let tol = input.tolerances().with_residual_tol(t)?;
        input.set_tolerances(tol);
    }
    let mut report = Report::new(suite, source.to_string(), input.seed());
    match &input {
        InputSpec::System(s) => system_suite(s, suite, &mut report)?,
        InputSpec::Algebra(a) => algebra_suite(a, suite, &mut report)?,
    }
    Ok(report.finish())
}
