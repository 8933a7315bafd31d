//! JSON input documents. Complex entries are `[re, im]` pairs and matrices are row-major.

use std::path::Path;

use serde::Serialize;
use serde_json::{Map, Value};

use crate::error::{Error, Result};
use crate::flow::WStarSystem;
use crate::numsub::{CMatrix, Tolerances, C64};
use crate::reflexivity::{OperatorAlgebraCarrier, Verdict};

pub const SPEC_VERSION: u64 = 1;

/// Row-major matrix of `[re, im]` pairs.
pub type MatrixRows = Vec<Vec<[f64; 2]>>;

/// A finite-dimensional periodic system: `M` generated by `generators` (with adjoints and
/// unit) under `U_z = diag(z^{weights})`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SystemSpec {
    pub version: u64,
    pub dimension: usize,
    pub weights: Vec<i64>,
    pub generators: Vec<MatrixRows>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub state_density: Option<MatrixRows>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub tolerances: Option<Tolerances>,
    pub seed: u64,
}

/// A unital, not necessarily selfadjoint, operator algebra with an optional expected
/// reflexivity outcome.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct AlgebraSpec {
    pub version: u64,
    pub kind: String,
    pub dimension: usize,
    pub generators: Vec<MatrixRows>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub expected_verdict: Option<Verdict>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub expected_closure_dim: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub tolerances: Option<Tolerances>,
    pub seed: u64,
}

#[derive(Debug, Clone, PartialEq)]
pub enum InputSpec {
    System(SystemSpec),
    Algebra(AlgebraSpec),
}

impl InputSpec {
    pub fn seed(&self) -> u64 {
        match self {
            InputSpec::System(s) => s.seed,
            InputSpec::Algebra(a) => a.seed,
        }
    }

    pub fn set_seed(&mut self, seed: u64) {
        match self {
            InputSpec::System(s) => s.seed = seed,
            InputSpec::Algebra(a) => a.seed = seed,
        }
    }

    pub fn tolerances(&self) -> Tolerances {
        match self {
            InputSpec::System(s) => s.tolerances,
            InputSpec::Algebra(a) => a.tolerances,
        }
        .unwrap_or_default()
    }

    pub fn set_tolerances(&mut self, tol: Tolerances) {
        match self {
            InputSpec::System(s) => s.tolerances = Some(tol),
            InputSpec::Algebra(a) => a.tolerances = Some(tol),
        }
    }

    /// Pretty-printed canonical JSON, newline-terminated.
    pub fn to_canonical_json(&self) -> String {
        let mut s = match self {
            InputSpec::System(s) => serde_json::to_string_pretty(s),
            InputSpec::Algebra(a) => serde_json::to_string_pretty(a),
        }
        .expect("serializable");
        s.push('\n');
        s
    }
}

pub fn matrix_to_rows(m: &CMatrix) -> MatrixRows {
    (0..m.nrows())
        .map(|i| {
            (0..m.ncols())
                .map(|j| [m[(i, j)].re, m[(i, j)].im])
                .collect()
        })
        .collect()
}

pub fn rows_to_matrix(rows: &MatrixRows) -> CMatrix {
    let r = rows.len();
    let c = rows.first().map_or(0, Vec::len);
    CMatrix::from_fn(r, c, |i, j| C64::new(rows[i][j][0], rows[i][j][1]))
}

impl SystemSpec {
    pub fn from_system(sys: &WStarSystem, generators: &[CMatrix], seed: u64) -> Self {
        SystemSpec {
            version: SPEC_VERSION,
            dimension: sys.ambient_dim(),
            weights: sys.action().weights().to_vec(),
            generators: generators.iter().map(matrix_to_rows).collect(),
            state_density: None,
            tolerances: None,
            seed,
        }
    }

    pub fn build(&self) -> Result<WStarSystem> {
        let tol = self.tolerances.unwrap_or_default();
        let gens: Vec<CMatrix> = self.generators.iter().map(rows_to_matrix).collect();
        if gens.is_empty() {
            return WStarSystem::new(
                crate::algebra::StarAlgebra::scalars(self.dimension, tol),
                crate::flow::CircleAction::new(self.weights.clone())?,
            );
        }
        WStarSystem::from_generators(&gens, self.weights.clone(), &tol)
    }

    pub fn density(&self) -> Option<CMatrix> {
        self.state_density.as_ref().map(rows_to_matrix)
    }
}

impl AlgebraSpec {
    pub fn build(&self) -> Result<OperatorAlgebraCarrier> {
        let tol = self.tolerances.unwrap_or_default();
        let gens: Vec<CMatrix> = self.generators.iter().map(rows_to_matrix).collect();
        if gens.is_empty() {
            return OperatorAlgebraCarrier::new(crate::algebra::StarAlgebra::scalars(
                self.dimension,
                tol,
            ));
        }
        OperatorAlgebraCarrier::generated_by(&gens, &tol)
    }
}

fn fail<T>(path: &str, message: impl Into<String>) -> Result<T> {
    Err(Error::spec(path, message))
}

fn join(path: &str, key: &str) -> String {
    if path.is_empty() {
        key.to_string()
    } else {
        format!("{path}.{key}")
    }
}

fn index(path: &str, i: usize) -> String {
    format!("{path}[{i}]")
}

fn as_object<'a>(v: &'a Value, path: &str) -> Result<&'a Map<String, Value>> {
    v.as_object()
        .map_or_else(|| fail(path, "expected an object"), Ok)
}

fn as_array<'a>(v: &'a Value, path: &str) -> Result<&'a Vec<Value>> {
    v.as_array()
        .map_or_else(|| fail(path, "expected an array"), Ok)
}

fn as_u64(v: &Value, path: &str) -> Result<u64> {
    v.as_u64()
        .map_or_else(|| fail(path, "expected a non-negative integer"), Ok)
}

fn as_i64(v: &Value, path: &str) -> Result<i64> {
    v.as_i64()
        .map_or_else(|| fail(path, "expected an integer"), Ok)
}

fn as_f64(v: &Value, path: &str) -> Result<f64> {
    match v.as_f64() {
        Some(x) if x.is_finite() => Ok(x),
        _ => fail(path, "expected a finite number"),
    }
}

fn matrix(v: &Value, d: usize, path: &str) -> Result<MatrixRows> {
    let rows = as_array(v, path)?;
    if rows.len() != d {
        return fail(path, format!("expected {d} rows, found {}", rows.len()));
    }
    let mut out = Vec::with_capacity(d);
    for (i, row) in rows.iter().enumerate() {
        let rp = index(path, i);
        let entries = as_array(row, &rp)?;
        if entries.len() != d {
            return fail(
                &rp,
                format!("expected {d} entries, found {}", entries.len()),
            );
        }
        let mut r = Vec::with_capacity(d);
        for (j, e) in entries.iter().enumerate() {
            let ep = index(&rp, j);
            let pair = as_array(e, &ep)?;
            if pair.len() != 2 {
                return fail(&ep, "expected an [re, im] pair");
            }
            r.push([
                as_f64(&pair[0], &index(&ep, 0))?,
                as_f64(&pair[1], &index(&ep, 1))?,
            ]);
        }
        out.push(r);
    }
    Ok(out)
}

fn tolerances(v: &Value, path: &str) -> Result<Tolerances> {
    let obj = as_object(v, path)?;
    let mut tol = Tolerances::default();
    for (key, val) in obj {
        let p = join(path, key);
        let x = as_f64(val, &p)?;
        match key.as_str() {
            "rank_tol" => tol.rank_tol = x,
            "subspace_tol" => tol.subspace_tol = x,
            "residual_tol" => tol.residual_tol = x,
            _ => return fail(&p, "unknown field"),
        }
    }
    tol.validate().or_else(|e| fail(path, e.to_string()))?;
    Ok(tol)
}

fn generators(v: &Value, d: usize, path: &str) -> Result<Vec<MatrixRows>> {
    as_array(v, path)?
        .iter()
        .enumerate()
        .map(|(k, g)| matrix(g, d, &index(path, k)))
        .collect()
}

fn check_fields(obj: &Map<String, Value>, allowed: &[&str]) -> Result<()> {
    for key in obj.keys() {
        if !allowed.contains(&key.as_str()) {
            return fail(key, "unknown field");
        }
    }
    Ok(())
}

fn required<'a>(obj: &'a Map<String, Value>, key: &str) -> Result<&'a Value> {
    obj.get(key)
        .map_or_else(|| fail(key, "missing required field"), Ok)
}

/// Validates a parsed document; errors name the offending field path.
pub fn parse_spec(doc: &Value) -> Result<InputSpec> {
    let obj = as_object(doc, "$")?;
    let version = as_u64(required(obj, "version")?, "version")?;
    if version != SPEC_VERSION {
        return fail("version", format!("unsupported version {version}"));
    }
    let kind = match obj.get("kind") {
        None => "system",
        Some(v) => v
            .as_str()
            .map_or_else(|| fail("kind", "expected a string"), Ok)?,
    };
    let d = as_u64(required(obj, "dimension")?, "dimension")? as usize;
    if d == 0 {
        return fail("dimension", "must be positive");
    }
    let tol = obj
        .get("tolerances")
        .map(|v| tolerances(v, "tolerances"))
        .transpose()?;
    let seed = obj
        .get("seed")
        .map(|v| as_u64(v, "seed"))
        .transpose()?
        .unwrap_or(0);
    let gens = generators(required(obj, "generators")?, d, "generators")?;
    match kind {
        "system" => {
            check_fields(
                obj,
                &[
                    "version",
                    "kind",
                    "dimension",
                    "weights",
                    "generators",
                    "state_density",
                    "tolerances",
                    "seed",
                ],
            )?;
            let w = as_array(required(obj, "weights")?, "weights")?;
            if w.len() != d {
                return fail(
                    "weights",
                    format!("expected {d} weights, found {}", w.len()),
                );
            }
            let weights = w
                .iter()
                .enumerate()
                .map(|(i, x)| as_i64(x, &index("weights", i)))
                .collect::<Result<Vec<_>>>()?;
            let state_density = obj
                .get("state_density")
                .map(|v| matrix(v, d, "state_density"))
                .transpose()?;
            Ok(InputSpec::System(SystemSpec {
                version,
                dimension: d,
                weights,
                generators: gens,
                state_density,
                tolerances: tol,
                seed,
            }))
        }
        "algebra" => {
            check_fields(
                obj,
                &[
                    "version",
                    "kind",
                    "dimension",
                    "generators",
                    "expected_verdict",
                    "expected_closure_dim",
                    "tolerances",
                    "seed",
                ],
            )?;
            let expected_verdict = match obj.get("expected_verdict") {
                None => None,
                Some(v) => Some(
                    serde_json::from_value::<VerdictName>(v.clone())
                        .map_err(|_| {
                            Error::spec(
                                "expected_verdict",
                                "expected reflexive, non_reflexive or inconclusive",
                            )
                        })?
                        .0,
                ),
            };
            let expected_closure_dim = obj
                .get("expected_closure_dim")
                .map(|v| as_u64(v, "expected_closure_dim").map(|x| x as usize))
                .transpose()?;
            Ok(InputSpec::Algebra(AlgebraSpec {
                version,
                kind: kind.to_string(),
                dimension: d,
                generators: gens,
                expected_verdict,
                expected_closure_dim,
                tolerances: tol,
                seed,
            }))
        }
        other => fail("kind", format!("unknown kind {other:?}")),
    }
}

struct VerdictName(Verdict);

impl<'de> serde::Deserialize<'de> for VerdictName {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let s = String::deserialize(d)?;
        match s.as_str() {
            "reflexive" => Ok(VerdictName(Verdict::Reflexive)),
            "non_reflexive" => Ok(VerdictName(Verdict::NonReflexive)),
            "inconclusive" => Ok(VerdictName(Verdict::Inconclusive)),
            _ => Err(serde::de::Error::custom("unknown verdict")),
        }
    }
}

pub fn parse_spec_str(text: &str) -> Result<InputSpec> {
    let doc: Value = serde_json::from_str(text).map_err(|e| {
        Error::spec(
            format!("line {}, column {}", e.line(), e.column()),
            format!("malformed JSON: {e}"),
        )
    })?;
    parse_spec(&doc)
}

pub fn load_spec(path: &Path) -> Result<InputSpec> {
    let text =
        std::fs::read_to_string(path).map_err(|e| Error::Io(format!("{}: {e}", path.display())))?;
    parse_spec_str(&text)
}

pub fn save_spec(spec: &InputSpec, path: &Path) -> Result<()> {
    std::fs::write(path, spec.to_canonical_json())
        .map_err(|e| Error::Io(format!("{}: {e}", path.display())))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn minimal() -> &'static str {
        r#"{"version": 1, "dimension": 1, "weights": [0], "generators": []}"#
    }

    #[test]
    fn minimal_spec_is_valid() {
        let spec = parse_spec_str(minimal()).unwrap();
        let InputSpec::System(s) = &spec else {
            panic!("system expected")
        };
        assert_eq!(s.seed, 0);
        let sys = s.build().unwrap();
        assert_eq!(sys.algebra().dim(), 1);
    }

    fn path_of(text: &str) -> String {
        match parse_spec_str(text).unwrap_err() {
            Error::Spec { path, .. } => path,
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn errors_carry_field_paths() {
        assert_eq!(
            path_of(r#"{"version": 1, "dimension": 2, "weights": [0], "generators": []}"#),
            "weights"
        );
        assert_eq!(
            path_of(
                r#"{"version": 1, "dimension": 1, "weights": [0],
                    "generators": [[[[1, 0, 3]]]]}"#
            ),
            "generators[0][0][0]"
        );
        assert_eq!(
            path_of(r#"{"version": 1, "dimension": 1, "weights": [0.5], "generators": []}"#),
            "weights[0]"
        );
        assert_eq!(
            path_of(r#"{"version": 2, "dimension": 1, "weights": [0], "generators": []}"#),
            "version"
        );
        assert_eq!(
            path_of(r#"{"version": 1, "dimension": 1, "weights": [0], "generators": [], "x": 1}"#),
            "x"
        );
        assert_eq!(
            path_of(
                r#"{"version": 1, "dimension": 1, "weights": [0], "generators": [],
                    "tolerances": {"rank_tol": -1}}"#
            ),
            "tolerances"
        );
        assert!(path_of("{").starts_with("line"));
    }

    #[test]
    fn canonical_form_is_stable() {
        let spec = parse_spec_str(
            r#"{"seed": 3, "generators": [[[[0.1, -2.5]]]], "weights": [4], "dimension": 1,
                "version": 1}"#,
        )
        .unwrap();
        let text = spec.to_canonical_json();
        let again = parse_spec_str(&text).unwrap();
        assert_eq!(spec, again);
        assert_eq!(text, again.to_canonical_json());
    }
}
