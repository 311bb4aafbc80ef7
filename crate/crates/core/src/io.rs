//! Scenario files in, report files out.
//!
//! Both are JSON. Complex numbers are `[re, im]` pairs. Unknown keys are rejected with the
//! path of the offending key. Reports are emitted with sorted keys and every float written
//! with 17 significant digits, so equal inputs give byte-identical files.

use std::fmt::Write as _;

use serde::{Deserialize, Serialize};
use serde_json::Value;

use crate::error::{Error, Result};
use crate::generators::GeneratorSpec;
use crate::numerics::C64;
use crate::theorems::{CheckReport, UmSide};
use crate::tolerance::Tolerances;

pub const SCHEMA_VERSION: i64 = 1;

/// Largest accepted dimension or term count; everything is dense.
pub const MAX_SIZE: usize = 1024;

/// A declarative scenario: an operator sequence under a transform, plus the checks to run.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScenarioFile {
    pub schema_version: i64,
    /// Ambient dimension `d`.
    pub dimension: usize,
    /// Number of terms `N`.
    pub terms: usize,
    #[serde(default)]
    pub seed: u64,
    pub generator: GeneratorSpec,
    #[serde(default)]
    pub transform: TransformSpec,
    /// Fail with a precondition error unless the transform is numerically invertible.
    #[serde(default)]
    pub transform_invertible: bool,
    #[serde(default)]
    pub checks: Vec<CheckSpec>,
    #[serde(default)]
    pub tolerances: Tolerances,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum TransformSpec {
    Identity {},
    Delta {},
    Banded {
        bands: Vec<Band>,
    },
    Dense {
        entries: Vec<Vec<C64>>,
    },
    RandomInvertible {
        #[serde(default, skip_serializing_if = "Option::is_none")]
        seed: Option<u64>,
    },
}

impl Default for TransformSpec {
    fn default() -> Self {
        TransformSpec::Identity {}
    }
}

/// One diagonal of a banded transform; `offset = column − row`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Band {
    pub offset: i64,
    pub value: C64,
}

/// How the second sequence `Γ` of a two-sequence check is obtained from `Λ`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum SequenceSpec {
    /// `Γₙ = c·Λₙ`
    Scaled { factor: C64 },
    /// `Γₙ = Λₙ + scale·Gₙ` with Gaussian `Gₙ` supported on the codomain rows of `Λₙ`.
    AdditiveNoise {
        scale: f64,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        seed: Option<u64>,
    },
    /// An independent sequence from its own generator.
    Generated {
        generator: GeneratorSpec,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        seed: Option<u64>,
    },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum WeightSpec {
    Constant {
        value: C64,
    },
    /// Moduli uniform in `[lo, hi]`, uniform phases.
    Random {
        lo: f64,
        hi: f64,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        seed: Option<u64>,
    },
    Explicit {
        values: Vec<C64>,
    },
}

impl Default for WeightSpec {
    fn default() -> Self {
        WeightSpec::Constant {
            value: C64::new(1.0, 0.0),
        }
    }
}

/// A `d × d` matrix such as the `U` of the composition results.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum MatrixSpec {
    Explicit {
        entries: Vec<Vec<C64>>,
    },
    ScaledIdentity {
        value: C64,
    },
    Diag {
        values: Vec<f64>,
    },
    /// Random self-adjoint matrix with the given operator norm.
    RandomHermitian {
        norm: f64,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        seed: Option<u64>,
    },
    /// Random positive definite matrix with spectrum in `[lo, hi]`.
    RandomHpd {
        lo: f64,
        hi: f64,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        seed: Option<u64>,
    },
}

fn default_samples() -> usize {
    100
}

fn default_true() -> bool {
    true
}

fn is_true(b: &bool) -> bool {
    *b
}

fn default_m_max() -> u32 {
    3
}

/// One named check with its parameters.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "name", rename_all = "snake_case", deny_unknown_fields)]
pub enum CheckSpec {
    /// Hermiticity, positivity, bracketing, adjointness and factorization of `S`.
    FrameProperties {
        #[serde(default = "default_samples")]
        samples: usize,
    },
    /// Dual bounds, reconstruction and dual-of-dual residuals.
    CanonicalDual {
        #[serde(default = "default_samples")]
        samples: usize,
    },
    #[serde(alias = "check_perturbation")]
    Perturbation {
        gamma: SequenceSpec,
        #[serde(default)]
        a: WeightSpec,
        #[serde(default)]
        b: WeightSpec,
        alpha: f64,
        #[serde(default)]
        beta: f64,
        #[serde(default = "default_true", skip_serializing_if = "is_true")]
        assert_conclusion: bool,
    },
    #[serde(alias = "check_perturbation_simple")]
    PerturbationSimple {
        gamma: SequenceSpec,
        alpha: f64,
        #[serde(default = "default_true", skip_serializing_if = "is_true")]
        assert_conclusion: bool,
    },
    #[serde(alias = "check_um_family")]
    UmFamily {
        u: MatrixSpec,
        #[serde(default = "default_m_max")]
        m_max: u32,
        #[serde(default)]
        side: UmSide,
    },
    #[serde(alias = "check_composition_selfadjoint")]
    CompositionSelfadjoint { u: MatrixSpec },
    #[serde(alias = "check_inv_sqrt_parseval")]
    InvSqrtParseval {},
    /// `ΛU` is built as `Λ·U`; the check then recovers the frame property of `Λ`.
    #[serde(alias = "check_closed_range")]
    ClosedRange { u: MatrixSpec },
    /// With `block_orthogonal`, `Λ` and `Γ` are placed in disjoint row blocks of a common padding.
    #[serde(alias = "check_sum_bessel")]
    SumBessel {
        gamma: SequenceSpec,
        u1: MatrixSpec,
        u2: MatrixSpec,
        #[serde(default = "default_true")]
        block_orthogonal: bool,
    },
    #[serde(alias = "check_sum_frame_combos")]
    SumFrameCombos {
        gamma: SequenceSpec,
        #[serde(default)]
        a: WeightSpec,
        #[serde(default)]
        b: WeightSpec,
        #[serde(default = "default_true")]
        block_orthogonal: bool,
    },
    /// Upper bound under the difference matrix against four times the identity-transform bound.
    DeltaBessel {},
    /// Interleaved-zeros sequence under the difference matrix.
    InterleavedDelta {},
}

impl CheckSpec {
    pub fn name(&self) -> &'static str {
        match self {
            CheckSpec::FrameProperties { .. } => "frame_properties",
            CheckSpec::CanonicalDual { .. } => "canonical_dual",
            CheckSpec::Perturbation { .. } => "perturbation",
            CheckSpec::PerturbationSimple { .. } => "perturbation_simple",
            CheckSpec::UmFamily { .. } => "um_family",
            CheckSpec::CompositionSelfadjoint { .. } => "composition_selfadjoint",
            CheckSpec::InvSqrtParseval {} => "inv_sqrt_parseval",
            CheckSpec::ClosedRange { .. } => "closed_range",
            CheckSpec::SumBessel { .. } => "sum_bessel",
            CheckSpec::SumFrameCombos { .. } => "sum_frame_combos",
            CheckSpec::DeltaBessel {} => "delta_bessel",
            CheckSpec::InterleavedDelta {} => "interleaved_delta",
        }
    }
}

fn scenario_error(path: impl Into<String>, message: impl Into<String>) -> Error {
    Error::Scenario {
        path: path.into(),
        message: message.into(),
    }
}

/// Parses and validates a scenario.
///
/// Structural problems (syntax, unknown keys, wrong types, unknown check names) are reported
/// with the path of the offending key. Semantic validation (matrix shapes, dimensions) is
/// done by [`crate::runner::validate_scenario`].
pub fn parse_scenario(text: &str) -> Result<ScenarioFile> {
    let value: Value = serde_json::from_str(text).map_err(|e| scenario_error("$", e.to_string()))?;
    let Value::Object(map) = &value else {
        return Err(scenario_error("$", "scenario must be an object"));
    };
    match map.get("schema_version") {
        None => return Err(scenario_error("schema_version", "missing field")),
        Some(v) => match v.as_i64() {
            Some(SCHEMA_VERSION) => {}
            Some(other) => return Err(Error::Version(other)),
            None => {
                return Err(scenario_error(
                    "schema_version",
                    format!("expected an integer, got {v}"),
                ))
            }
        },
    }
    let scenario: ScenarioFile = serde_path_to_error::deserialize(&value).map_err(|e| {
        let path = e.path().to_string();
        scenario_error(if path == "." { "$".into() } else { path }, e.inner().to_string())
    })?;
    if scenario.dimension == 0 {
        return Err(scenario_error("dimension", "must be at least 1"));
    }
    if scenario.terms == 0 {
        return Err(scenario_error("terms", "must be at least 1"));
    }
    if scenario.dimension > MAX_SIZE {
        return Err(scenario_error("dimension", format!("must be at most {MAX_SIZE}")));
    }
    if scenario.terms > MAX_SIZE {
        return Err(scenario_error("terms", format!("must be at most {MAX_SIZE}")));
    }
    check_tolerances(&scenario.tolerances)?;
    Ok(scenario)
}

fn check_tolerances(tol: &Tolerances) -> Result<()> {
    let value = serde_json::to_value(tol).expect("tolerances serialize");
    for (key, v) in value.as_object().expect("tolerances are an object") {
        match v.as_f64() {
            Some(x) if x.is_finite() && x >= 0.0 => {}
            _ => {
                return Err(scenario_error(
                    format!("tolerances.{key}"),
                    "must be finite and non-negative",
                ))
            }
        }
    }
    Ok(())
}

/// Canonical text of a scenario (same format as reports).
pub fn emit_scenario(s: &ScenarioFile) -> String {
    emit_value(&serde_json::to_value(s).expect("scenario serializes"))
}

/// Frame-level part of a report.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct FrameSummary {
    pub lower_opt: f64,
    pub upper_opt: f64,
    pub classification: crate::model::Classification,
    pub hermiticity_residual: f64,
    /// Rows of `S`.
    pub frame_operator: Vec<Vec<C64>>,
}

/// One check's report, optionally with its wall time.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CheckEntry {
    #[serde(flatten)]
    pub report: CheckReport,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub wall_time_ms: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ReportFile {
    pub schema_version: i64,
    pub scenario: ScenarioFile,
    /// Tolerances actually used, after any command-line scaling.
    pub effective_tolerances: Tolerances,
    pub frame: FrameSummary,
    pub checks: Vec<CheckEntry>,
    pub overall_pass: bool,
}

impl ReportFile {
    pub fn new(
        scenario: ScenarioFile,
        effective_tolerances: Tolerances,
        frame: FrameSummary,
        checks: Vec<CheckEntry>,
    ) -> Self {
        let overall_pass = checks.iter().all(|c| c.report.passed);
        Self {
            schema_version: SCHEMA_VERSION,
            scenario,
            effective_tolerances,
            frame,
            checks,
            overall_pass,
        }
    }
}

/// Deterministic report text: sorted keys, two-space indent, floats as `{:.16e}`.
pub fn emit_report(r: &ReportFile) -> String {
    emit_value(&serde_json::to_value(r).expect("report serializes"))
}

/// Writes a JSON value with sorted keys and fixed float formatting.
pub fn emit_value(v: &Value) -> String {
    let mut out = String::new();
    write_value(&mut out, v, 0);
    out.push('\n');
    out
}

fn write_value(out: &mut String, v: &Value, indent: usize) {
    match v {
        Value::Null => out.push_str("null"),
        Value::Bool(b) => out.push_str(if *b { "true" } else { "false" }),
        Value::Number(n) => {
            if let Some(i) = n.as_i64() {
                write!(out, "{i}").unwrap();
            } else if let Some(u) = n.as_u64() {
                write!(out, "{u}").unwrap();
            } else {
                write!(out, "{:.16e}", n.as_f64().expect("number is f64")).unwrap();
            }
        }
        Value::String(s) => out.push_str(&Value::String(s.clone()).to_string()),
        Value::Array(items) => {
            if items.iter().all(|x| !x.is_array() && !x.is_object()) {
                out.push('[');
                for (i, x) in items.iter().enumerate() {
                    if i > 0 {
                        out.push_str(", ");
                    }
                    write_value(out, x, indent);
                }
                out.push(']');
                return;
            }
            out.push_str("[\n");
            for (i, x) in items.iter().enumerate() {
                pad(out, indent + 1);
                write_value(out, x, indent + 1);
                out.push_str(if i + 1 < items.len() { ",\n" } else { "\n" });
            }
            pad(out, indent);
            out.push(']');
        }
        Value::Object(map) => {
            if map.is_empty() {
                out.push_str("{}");
                return;
            }
            let mut keys: Vec<&String> = map.keys().collect();
            keys.sort();
            out.push_str("{\n");
            for (i, k) in keys.iter().enumerate() {
                pad(out, indent + 1);
                out.push_str(&Value::String((*k).clone()).to_string());
                out.push_str(": ");
                write_value(out, &map[*k], indent + 1);
                out.push_str(if i + 1 < keys.len() { ",\n" } else { "\n" });
            }
            pad(out, indent);
            out.push('}');
        }
    }
}

fn pad(out: &mut String, indent: usize) {
    for _ in 0..indent {
        out.push_str("  ");
    }
}
