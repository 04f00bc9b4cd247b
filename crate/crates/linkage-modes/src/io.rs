//! Stable on-disk formats: topology and length inputs, system and solution
//! documents, run manifests, the optimizer CSV, and a small JSON-schema
//! validator used to check every `--json` output against the shipped
//! schemas.

use std::collections::BTreeMap;
use std::str::FromStr;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::Zero;
use serde::{Deserialize, Serialize};
use serde_json::Value;
use thiserror::Error;

use crate::cayley::{CayleyError, DistanceAssignment, MinorSystem, ReconstructionPlan};
use crate::graph::{GraphError, LinkageGraph};
use crate::homotopy::{OracleCount, SolutionSet};
use crate::optimize::OptimizerRun;
use crate::poly::Polynomial;
use crate::realize::Embedding;

#[derive(Debug, Error)]
pub enum IoError {
    #[error("malformed JSON: {0}")]
    Json(#[from] serde_json::Error),
    #[error("bad edge key '{0}': expected the form \"a-b\"")]
    BadEdgeKey(String),
    #[error(transparent)]
    Lengths(#[from] CayleyError),
    #[error(transparent)]
    Graph(#[from] GraphError),
    #[error("bad rational '{0}'")]
    BadRational(String),
    #[error("polynomial entry {index}: expected {expected} exponents, got {got}")]
    ExponentArity {
        index: usize,
        expected: usize,
        got: usize,
    },
    #[error("vector form needs exactly {expected} lengths, got {got}")]
    VectorArity { expected: usize, got: usize },
    #[error(transparent)]
    File(#[from] std::io::Error),
}

// ---------------------------------------------------------------------------
// Topology documents.

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct TopologyJson {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub id: Option<String>,
    pub n: u8,
    pub edges: Vec<(u8, u8)>,
}

impl TopologyJson {
    pub fn from_graph(id: Option<String>, g: &LinkageGraph) -> Self {
        TopologyJson {
            id,
            n: g.n(),
            edges: g.edges().collect(),
        }
    }

    pub fn to_graph(&self) -> Result<LinkageGraph, IoError> {
        Ok(LinkageGraph::new(self.n, self.edges.iter().copied())?)
    }
}

/// Parses a topology document and validates it into a graph.
pub fn parse_topology_json(s: &str) -> Result<LinkageGraph, IoError> {
    let doc: TopologyJson = serde_json::from_str(s)?;
    doc.to_graph()
}

// ---------------------------------------------------------------------------
// Length assignments.

#[derive(Deserialize)]
#[serde(untagged)]
enum LengthsJson {
    /// {"edges": {"1-2": 180.0, ...}}
    Edges { edges: BTreeMap<String, f64> },
    /// {"vector": [l0, ..., l10]} in lexicographic edge order.
    Vector { vector: Vec<f64> },
}

fn parse_edge_key(key: &str) -> Result<(u8, u8), IoError> {
    let bad = || IoError::BadEdgeKey(key.to_string());
    let (a, b) = key.split_once('-').ok_or_else(bad)?;
    let a: u8 = a.trim().parse().map_err(|_| bad())?;
    let b: u8 = b.trim().parse().map_err(|_| bad())?;
    if a == b {
        return Err(bad());
    }
    Ok((a, b))
}

/// Parses a lengths file — edge-map or vector form — and validates that it
/// covers `g` with positive values.
pub fn parse_lengths_json(s: &str, g: &LinkageGraph) -> Result<DistanceAssignment, IoError> {
    let doc: LengthsJson = serde_json::from_str(s)?;
    let assignment = match doc {
        LengthsJson::Edges { edges } => {
            let mut pairs = Vec::with_capacity(edges.len());
            for (k, v) in &edges {
                pairs.push((parse_edge_key(k)?, *v));
            }
            DistanceAssignment::new(pairs)?
        }
        LengthsJson::Vector { vector } => {
            if vector.len() != g.edge_count() {
                return Err(IoError::VectorArity {
                    expected: g.edge_count(),
                    got: vector.len(),
                });
            }
            DistanceAssignment::from_vector(g, &vector)?
        }
    };
    assignment.covers(g)?;
    Ok(assignment)
}

pub fn lengths_to_json(lengths: &DistanceAssignment) -> String {
    let edges: BTreeMap<String, f64> = lengths
        .edges()
        .map(|((a, b), l)| (format!("{a}-{b}"), l))
        .collect();
    serde_json::to_string_pretty(&serde_json::json!({ "edges": edges })).unwrap()
}

// ---------------------------------------------------------------------------
// System documents.

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct TermJson {
    pub exponents: Vec<u16>,
    /// Exact rational coefficient, "p" or "p/q".
    pub coeff: String,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct PolyJson {
    pub minor: [u8; 4],
    pub terms: Vec<TermJson>,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct PlanJson {
    pub base: [u8; 3],
    pub steps: Vec<(u8, [u8; 3])>,
    pub checks: Vec<(u8, u8)>,
}

impl From<&ReconstructionPlan> for PlanJson {
    fn from(p: &ReconstructionPlan) -> Self {
        PlanJson {
            base: p.base,
            steps: p.steps.iter().map(|s| (s.vertex, s.anchors)).collect(),
            checks: p.checks.clone(),
        }
    }
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct SystemJson {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub topology: Option<String>,
    /// Unknown names in system order ("x15", ...).
    pub variables: Vec<String>,
    /// Squared-length parameter names in sorted edge order ("c12", ...).
    pub parameters: Vec<String>,
    /// Vertex 4-subsets naming the minors.
    pub minors: Vec<[u8; 4]>,
    /// Expanded polynomials; exponents run over parameters then variables.
    pub polynomials: Vec<PolyJson>,
    pub mixed_volume: u64,
    pub bezout: u64,
    pub plan: PlanJson,
}

impl SystemJson {
    pub fn from_system(sys: &MinorSystem) -> Self {
        let params: Vec<String> = sys
            .graph
            .edges()
            .map(|e| crate::cayley::pair_var('c', e))
            .collect();
        let polynomials = sys
            .minors
            .iter()
            .zip(&sys.polynomials)
            .map(|(m, p)| PolyJson {
                minor: *m,
                terms: p
                    .terms()
                    .map(|(exps, coeff)| TermJson {
                        exponents: exps.to_vec(),
                        coeff: coeff.to_string(),
                    })
                    .collect(),
            })
            .collect();
        SystemJson {
            topology: sys.topology.map(|t| t.to_string()),
            variables: sys.var_names(),
            parameters: params,
            minors: sys.minors.clone(),
            polynomials,
            mixed_volume: sys.mixed_volume,
            bezout: sys.degrees().iter().map(|&d| d as u64).product(),
            plan: PlanJson::from(&sys.plan),
        }
    }

    /// Rebuilds the polynomials over the document's own variable list.
    pub fn to_polynomials(&self) -> Result<Vec<Polynomial>, IoError> {
        let vars: Vec<String> = self
            .parameters
            .iter()
            .chain(&self.variables)
            .cloned()
            .collect();
        let arity = vars.len();
        self.polynomials
            .iter()
            .enumerate()
            .map(|(index, p)| {
                let mut terms = Vec::with_capacity(p.terms.len());
                for t in &p.terms {
                    if t.exponents.len() != arity {
                        return Err(IoError::ExponentArity {
                            index,
                            expected: arity,
                            got: t.exponents.len(),
                        });
                    }
                    terms.push((t.exponents.clone(), parse_rational(&t.coeff)?));
                }
                Ok(Polynomial::from_terms(vars.clone(), terms))
            })
            .collect()
    }
}

/// Parses "p" or "p/q" with a nonzero denominator. `BigRational`'s own
/// `FromStr` aborts on a zero denominator, which untrusted input must not be
/// able to trigger.
pub fn parse_rational(s: &str) -> Result<BigRational, IoError> {
    let bad = || IoError::BadRational(s.to_string());
    match s.split_once('/') {
        None => {
            let n = BigInt::from_str(s.trim()).map_err(|_| bad())?;
            Ok(BigRational::from_integer(n))
        }
        Some((num, den)) => {
            let n = BigInt::from_str(num.trim()).map_err(|_| bad())?;
            let d = BigInt::from_str(den.trim()).map_err(|_| bad())?;
            if d.is_zero() {
                return Err(bad());
            }
            Ok(BigRational::new(n, d))
        }
    }
}

/// Parses and structurally validates a system document.
pub fn parse_system_json(s: &str) -> Result<SystemJson, IoError> {
    let doc: SystemJson = serde_json::from_str(s)?;
    doc.to_polynomials()?; // validates arities and coefficients
    Ok(doc)
}

// ---------------------------------------------------------------------------
// Solution and oracle documents.

#[derive(Clone, Copy, Debug, Serialize, Deserialize)]
pub struct ComplexJson {
    pub re: f64,
    pub im: f64,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct SolutionJson {
    pub point: Vec<ComplexJson>,
    pub residual: f64,
    pub multiplicity: usize,
    pub real: bool,
    pub real_positive: bool,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct SolveSetJson {
    pub solutions: Vec<SolutionJson>,
    pub paths_tracked: usize,
    pub paths_diverged: usize,
    pub paths_failed: usize,
    pub real: usize,
    pub real_positive: usize,
    pub borderline: usize,
}

impl SolveSetJson {
    pub fn from_set(set: &SolutionSet, real_tol: f64) -> Self {
        let solutions = set
            .solutions
            .iter()
            .map(|s| {
                let real = s
                    .point
                    .iter()
                    .all(|z| z.im.abs() < real_tol * (1.0 + z.re.abs()));
                let real_positive = real && s.point.iter().all(|z| z.re > real_tol);
                SolutionJson {
                    point: s.point.iter().map(|z| ComplexJson { re: z.re, im: z.im }).collect(),
                    residual: s.residual,
                    multiplicity: s.multiplicity,
                    real,
                    real_positive,
                }
            })
            .collect();
        SolveSetJson {
            solutions,
            paths_tracked: set.paths_tracked,
            paths_diverged: set.paths_diverged,
            paths_failed: set.paths_failed,
            real: set.classification.real,
            real_positive: set.classification.real_positive,
            borderline: set.classification.borderline,
        }
    }
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct OracleJson {
    pub complex: usize,
    pub real: usize,
    pub congruence_classes: usize,
    pub odd_real: bool,
    pub borderline: usize,
    /// N: real positive minor-system solutions.
    pub n_positive: u32,
    /// How many of those survive reconstruction.
    pub embeddable: u32,
}

impl OracleJson {
    pub fn new(oracle: &OracleCount, n_positive: u32, embeddable: u32) -> Self {
        OracleJson {
            complex: oracle.complex,
            real: oracle.real,
            congruence_classes: oracle.congruence_classes,
            odd_real: oracle.odd_real,
            borderline: oracle.borderline,
            n_positive,
            embeddable,
        }
    }
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct EmbeddingJson {
    pub coords: Vec<[f64; 2]>,
    pub orientation: i8,
    pub max_residual: f64,
}

impl From<&Embedding> for EmbeddingJson {
    fn from(e: &Embedding) -> Self {
        EmbeddingJson {
            coords: e.coords.iter().map(|&(x, y)| [x, y]).collect(),
            orientation: e.orientation,
            max_residual: e.max_residual,
        }
    }
}

// ---------------------------------------------------------------------------
// Run manifests and the optimizer CSV.

/// Provenance block cited by every output file: what ran, with which
/// configuration and seed, over which files, when.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct RunManifest {
    pub command: String,
    pub config: Value,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
    pub version: String,
    pub inputs: Vec<String>,
    pub outputs: Vec<String>,
    pub timestamp: String,
}

impl RunManifest {
    pub fn new(command: String, config: Value, seed: Option<u64>) -> Self {
        RunManifest {
            command,
            config,
            seed,
            version: env!("CARGO_PKG_VERSION").to_string(),
            inputs: Vec::new(),
            outputs: Vec::new(),
            timestamp: chrono::Utc::now().to_rfc3339(),
        }
    }

    /// Compact one-line form with the timestamp stripped, for embedding in
    /// outputs that must be byte-identical across reruns (the SVG comment).
    pub fn timestamp_free_comment(&self) -> String {
        let mut v = serde_json::to_value(self).unwrap();
        if let Some(obj) = v.as_object_mut() {
            obj.remove("timestamp");
        }
        serde_json::to_string(&v).unwrap()
    }
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct RunJson {
    pub method: String,
    pub seed: u64,
    pub best_n: u32,
    pub evals_to_best: usize,
    pub evaluations: usize,
    pub wall_ms: u64,
    pub best: Vec<i64>,
    /// Table-style "n (m)" cell.
    pub display: String,
}

impl From<&OptimizerRun> for RunJson {
    fn from(r: &OptimizerRun) -> Self {
        RunJson {
            method: r.method.to_string(),
            seed: r.seed,
            best_n: r.best_value,
            evals_to_best: r.evals_to_best,
            evaluations: r.evaluations,
            wall_ms: r.wall_ms,
            best: r.best.clone(),
            display: r.display_cell(),
        }
    }
}

/// One row per run: `method,seed,best_N,evals_to_best,wall_ms,display`,
/// preceded by a manifest comment.
pub fn write_runs_csv(runs: &[OptimizerRun], manifest: &RunManifest) -> String {
    let mut out = String::new();
    out.push_str(&format!(
        "# manifest: {}\n",
        serde_json::to_string(manifest).unwrap()
    ));
    out.push_str("method,seed,best_N,evals_to_best,wall_ms,display\n");
    for r in runs {
        out.push_str(&format!(
            "{},{},{},{},{},{}\n",
            r.method,
            r.seed,
            r.best_value,
            r.evals_to_best,
            r.wall_ms,
            r.display_cell()
        ));
    }
    out
}

/// Reads back the data rows of a runs CSV (comments and header skipped).
pub fn parse_runs_csv(s: &str) -> Vec<RunJson> {
    s.lines()
        .filter(|l| !l.starts_with('#') && !l.starts_with("method,") && !l.trim().is_empty())
        .filter_map(|l| {
            let mut f = l.splitn(6, ',');
            Some(RunJson {
                method: f.next()?.to_string(),
                seed: f.next()?.parse().ok()?,
                best_n: f.next()?.parse().ok()?,
                evals_to_best: f.next()?.parse().ok()?,
                wall_ms: f.next()?.parse().ok()?,
                best: Vec::new(),
                evaluations: 0,
                display: f.next()?.to_string(),
            })
        })
        .collect()
}

// ---------------------------------------------------------------------------
// Minimal JSON-schema validation (the subset the shipped schemas use:
// type / properties / required / items / additionalProperties / enum /
// minimum).

pub fn validate_schema(schema: &Value, instance: &Value) -> Result<(), String> {
    validate_at(schema, instance, "$")
}

fn type_matches(ty: &str, v: &Value) -> bool {
    match ty {
        "object" => v.is_object(),
        "array" => v.is_array(),
        "string" => v.is_string(),
        "boolean" => v.is_boolean(),
        "null" => v.is_null(),
        "integer" => v.as_i64().is_some() || v.as_u64().is_some(),
        "number" => v.is_number(),
        _ => false,
    }
}

fn validate_at(schema: &Value, v: &Value, path: &str) -> Result<(), String> {
    let Some(obj) = schema.as_object() else {
        return Err(format!("{path}: schema node is not an object"));
    };
    if let Some(ty) = obj.get("type") {
        let ok = match ty {
            Value::String(t) => type_matches(t, v),
            Value::Array(ts) => ts
                .iter()
                .filter_map(|t| t.as_str())
                .any(|t| type_matches(t, v)),
            _ => false,
        };
        if !ok {
            return Err(format!("{path}: expected type {ty}, got {v}"));
        }
    }
    if let Some(allowed) = obj.get("enum").and_then(|e| e.as_array()) {
        if !allowed.contains(v) {
            return Err(format!("{path}: {v} not in enum"));
        }
    }
    if let Some(min) = obj.get("minimum").and_then(|m| m.as_f64()) {
        if let Some(x) = v.as_f64() {
            if x < min {
                return Err(format!("{path}: {x} below minimum {min}"));
            }
        }
    }
    if let (Some(props), Some(map)) = (obj.get("properties").and_then(|p| p.as_object()), v.as_object()) {
        for (name, sub) in props {
            if let Some(val) = map.get(name) {
                validate_at(sub, val, &format!("{path}.{name}"))?;
            }
        }
        if obj.get("additionalProperties") == Some(&Value::Bool(false)) {
            for key in map.keys() {
                if !props.contains_key(key) {
                    return Err(format!("{path}: unexpected property '{key}'"));
                }
            }
        }
    }
    if let (Some(req), Some(map)) = (obj.get("required").and_then(|r| r.as_array()), v.as_object()) {
        for name in req.iter().filter_map(|r| r.as_str()) {
            if !map.contains_key(name) {
                return Err(format!("{path}: missing required property '{name}'"));
            }
        }
    }
    if let (Some(items), Some(arr)) = (obj.get("items"), v.as_array()) {
        for (i, item) in arr.iter().enumerate() {
            validate_at(items, item, &format!("{path}[{i}]"))?;
        }
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cayley::canonical_system_v17;
    use crate::graph::{builtin_topology, TopologyId};

    #[test]
    fn topology_roundtrip() {
        let g = builtin_topology(TopologyId::V17);
        let doc = TopologyJson::from_graph(Some("v17".into()), &g);
        let s = serde_json::to_string(&doc).unwrap();
        let back = parse_topology_json(&s).unwrap();
        assert_eq!(back, g);
    }

    #[test]
    fn lengths_both_forms() {
        let g = builtin_topology(TopologyId::V17);
        let v: Vec<f64> = vec![180.0, 70.0, 200.0, 205.0, 210.0, 205.0, 80.0, 200.0, 70.0, 200.0, 100.0];
        let from_vec = parse_lengths_json(
            &serde_json::json!({ "vector": v }).to_string(),
            &g,
        )
        .unwrap();
        let as_map = lengths_to_json(&from_vec);
        let from_map = parse_lengths_json(&as_map, &g).unwrap();
        assert_eq!(from_vec.to_vector(&g).unwrap(), from_map.to_vector(&g).unwrap());
        assert_eq!(from_vec.length(1, 2), Some(180.0));
        assert_eq!(from_vec.length(5, 7), Some(100.0));
    }

    #[test]
    fn lengths_rejections() {
        let g = builtin_topology(TopologyId::V17);
        for bad in [
            r#"{"edges": {"1-2": 0.0}}"#,            // zero length
            r#"{"edges": {"1-1": 5.0}}"#,            // self loop key
            r#"{"edges": {"12": 5.0}}"#,             // malformed key
            r#"{"vector": [1.0, 2.0]}"#,             // wrong arity
            r#"{"edges": {"1-2": 100.0}}"#,          // missing edges
            "not json",
        ] {
            assert!(parse_lengths_json(bad, &g).is_err(), "{bad}");
        }
    }

    #[test]
    fn system_document_roundtrip() {
        let sys = canonical_system_v17();
        let doc = SystemJson::from_system(&sys);
        let s = serde_json::to_string(&doc).unwrap();
        let back = parse_system_json(&s).unwrap();
        assert_eq!(back.variables, doc.variables);
        assert_eq!(back.mixed_volume, 56);
        let polys = back.to_polynomials().unwrap();
        assert_eq!(polys, sys.polynomials);
    }

    #[test]
    fn rational_parser_guards() {
        assert_eq!(parse_rational("3/4").unwrap().to_string(), "3/4");
        assert_eq!(parse_rational("-6/4").unwrap().to_string(), "-3/2");
        assert_eq!(parse_rational("17").unwrap().to_string(), "17");
        assert!(parse_rational("1/0").is_err());
        assert!(parse_rational("x/2").is_err());
        assert!(parse_rational("").is_err());
    }

    #[test]
    fn csv_roundtrip() {
        use crate::optimize::{OptimizerRun, SearchMethod};
        let run = OptimizerRun {
            method: SearchMethod::Ce,
            seed: 9,
            trajectory: vec![],
            best: vec![100; 10],
            best_value: 56,
            evals_to_best: 425,
            evaluations: 600,
            wall_ms: 1234,
            ce_generations: vec![],
        };
        let manifest = RunManifest::new("optimize".into(), serde_json::json!({}), Some(9));
        let csv = write_runs_csv(&[run], &manifest);
        assert!(csv.starts_with("# manifest: "));
        assert!(csv.contains("method,seed,best_N,evals_to_best,wall_ms,display"));
        let rows = parse_runs_csv(&csv);
        assert_eq!(rows.len(), 1);
        assert_eq!(rows[0].best_n, 56);
        assert_eq!(rows[0].display, "56 (425)");
    }

    #[test]
    fn schema_validator_subset() {
        let schema = serde_json::json!({
            "type": "object",
            "required": ["n", "edges"],
            "additionalProperties": false,
            "properties": {
                "n": {"type": "integer", "minimum": 3},
                "edges": {"type": "array", "items": {"type": "array", "items": {"type": "integer"}}},
                "id": {"type": ["string", "null"]}
            }
        });
        let good = serde_json::json!({"n": 7, "edges": [[1,2],[2,3]]});
        assert!(validate_schema(&schema, &good).is_ok());
        for bad in [
            serde_json::json!({"edges": []}),                  // missing n
            serde_json::json!({"n": 2, "edges": []}),          // below minimum
            serde_json::json!({"n": 7, "edges": [["a"]]}),     // wrong item type
            serde_json::json!({"n": 7, "edges": [], "x": 1}),  // additional property
        ] {
            assert!(validate_schema(&schema, &bad).is_err(), "{bad}");
        }
    }

    #[test]
    fn manifest_comment_drops_timestamp_only() {
        let m = RunManifest::new("count".into(), serde_json::json!({"seed": 1}), Some(1));
        let c = m.timestamp_free_comment();
        assert!(!c.contains("timestamp"));
        assert!(c.contains("\"command\":\"count\""));
        let again = m.timestamp_free_comment();
        assert_eq!(c, again);
    }
}
