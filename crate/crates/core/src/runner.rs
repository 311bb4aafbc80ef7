//! Turns a parsed scenario into concrete objects and runs its checks.

use std::time::Instant;

use crate::error::{Error, Result};
use crate::frames::frame_report;
use crate::generators::{
    derive_seed, gen_random_operator_sequence, gen_weights, random_hermitian, random_hpd, random_invertible_transform,
};
use crate::io::{
    CheckEntry, CheckSpec, FrameSummary, MatrixSpec, ReportFile, ScenarioFile, SequenceSpec, TransformSpec, WeightSpec,
};
use crate::model::{OperatorSequence, WeightSequence};
use crate::numerics::{ComplexMatrix, C64, ONE};
use crate::theorems::{self, CheckReport};
use crate::tolerance::Tolerances;
use crate::transform::{make_banded, make_delta, make_dense, make_identity, TransformMatrix};

const TRANSFORM_TAG: u64 = 1;
const CHECK_TAG_BASE: u64 = 1000;
const SLOTS_PER_CHECK: u64 = 16;
const SAMPLE_SLOT: u64 = 15;

/// Seed for slot `slot` of check `index`, unless the check pins one.
fn check_seed(base: u64, index: usize, slot: u64, pinned: Option<u64>) -> u64 {
    pinned.unwrap_or_else(|| derive_seed(base, CHECK_TAG_BASE + SLOTS_PER_CHECK * index as u64 + slot))
}

/// Re-labels input-shaped errors with the scenario path they came from.
fn at<T>(path: impl Fn() -> String, r: Result<T>) -> Result<T> {
    r.map_err(|e| match e {
        Error::Shape { .. } | Error::Domain(_) => Error::Scenario {
            path: path(),
            message: e.to_string(),
        },
        other => other,
    })
}

pub fn build_transform(spec: &TransformSpec, n: usize, seed: u64) -> Result<TransformMatrix> {
    match spec {
        TransformSpec::Identity {} => make_identity(n),
        TransformSpec::Delta {} => make_delta(n),
        TransformSpec::Banded { bands } => {
            let bands: Vec<(i64, C64)> = bands.iter().map(|b| (b.offset, b.value)).collect();
            make_banded(n, &bands)
        }
        TransformSpec::Dense { entries } => {
            let m = ComplexMatrix::from_rows(entries)?;
            if m.shape() != (n, n) {
                return Err(Error::shape(
                    "dense transform",
                    format!("({n}, {n})"),
                    format!("{:?}", m.shape()),
                ));
            }
            make_dense(m)
        }
        TransformSpec::RandomInvertible { seed: pinned } => {
            random_invertible_transform(n, pinned.unwrap_or_else(|| derive_seed(seed, TRANSFORM_TAG)))
        }
    }
}

pub fn build_matrix(spec: &MatrixSpec, d: usize, seed: u64) -> Result<ComplexMatrix> {
    let m = match spec {
        MatrixSpec::Explicit { entries } => ComplexMatrix::from_rows(entries)?,
        MatrixSpec::ScaledIdentity { value } => ComplexMatrix::identity(d).scale(*value),
        MatrixSpec::Diag { values } => ComplexMatrix::diag_real(values),
        MatrixSpec::RandomHermitian { norm, .. } => {
            if !(norm.is_finite() && *norm >= 0.0) {
                return Err(Error::Domain(format!("norm {norm} must be finite and non-negative")));
            }
            random_hermitian(d, *norm, seed)
        }
        MatrixSpec::RandomHpd { lo, hi, .. } => {
            if !(lo.is_finite() && hi.is_finite() && *lo > 0.0 && lo <= hi) {
                return Err(Error::Domain(format!(
                    "spectrum [{lo}, {hi}] must satisfy 0 < lo <= hi"
                )));
            }
            random_hpd(d, *lo, *hi, seed)
        }
    };
    if m.shape() != (d, d) {
        return Err(Error::shape(
            "matrix",
            format!("({d}, {d})"),
            format!("{:?}", m.shape()),
        ));
    }
    if !m.is_finite() {
        return Err(Error::Domain("matrix has non-finite entries".into()));
    }
    Ok(m)
}

fn matrix_seed(spec: &MatrixSpec) -> Option<u64> {
    match spec {
        MatrixSpec::RandomHermitian { seed, .. } | MatrixSpec::RandomHpd { seed, .. } => *seed,
        _ => None,
    }
}

pub fn build_weights(spec: &WeightSpec, n: usize, seed: u64) -> Result<WeightSequence> {
    match spec {
        WeightSpec::Constant { value } => WeightSequence::constant(n, *value),
        WeightSpec::Random { lo, hi, .. } => gen_weights(n, *lo, *hi, seed),
        WeightSpec::Explicit { values } => {
            if values.len() != n {
                return Err(Error::shape("weights", format!("{n} values"), values.len()));
            }
            WeightSequence::new(values.clone())
        }
    }
}

fn weight_seed(spec: &WeightSpec) -> Option<u64> {
    match spec {
        WeightSpec::Random { seed, .. } => *seed,
        _ => None,
    }
}

pub fn build_sequence(spec: &SequenceSpec, lam: &OperatorSequence, seed: u64) -> Result<OperatorSequence> {
    match spec {
        SequenceSpec::Scaled { factor } => Ok(lam.scaled(*factor)),
        SequenceSpec::AdditiveNoise { scale, .. } => {
            if !scale.is_finite() {
                return Err(Error::Domain(format!("noise scale {scale} is not finite")));
            }
            let noise = gen_random_operator_sequence(lam.dim(), lam.family().codomain_dims(), seed)?;
            lam.combine(ONE, &noise, C64::new(*scale, 0.0))
        }
        SequenceSpec::Generated { generator, .. } => generator.build(lam.dim(), lam.term_count(), seed),
    }
}

fn sequence_seed(spec: &SequenceSpec) -> Option<u64> {
    match spec {
        SequenceSpec::AdditiveNoise { seed, .. } | SequenceSpec::Generated { seed, .. } => *seed,
        SequenceSpec::Scaled { .. } => None,
    }
}

/// Places `Λ` and `Γ` in disjoint row blocks so their ranges are orthogonal term by term.
fn block_pair(lam: &OperatorSequence, gam: &OperatorSequence) -> Result<(OperatorSequence, OperatorSequence)> {
    let pad = lam.pad_dim() + gam.pad_dim();
    Ok((lam.embed_rows(pad, 0)?, gam.embed_rows(pad, lam.pad_dim())?))
}

/// The concrete objects of a scenario.
#[derive(Debug, Clone)]
pub struct Prepared {
    pub sequence: OperatorSequence,
    pub transform: TransformMatrix,
}

pub fn prepare(s: &ScenarioFile, tol: &Tolerances) -> Result<Prepared> {
    let sequence = at(|| "generator".into(), s.generator.build(s.dimension, s.terms, s.seed))?;
    let transform = at(|| "transform".into(), build_transform(&s.transform, s.terms, s.seed))?;
    if s.transform_invertible && !transform.is_invertible(tol.tol_pd) {
        return Err(Error::Precondition(format!(
            "transform declared invertible but its smallest singular value is {:e}",
            transform.smallest_singular_value()
        )));
    }
    Ok(Prepared { sequence, transform })
}

/// Runs one check of a scenario.
pub fn run_check(
    spec: &CheckSpec,
    index: usize,
    base_seed: u64,
    p: &Prepared,
    tol: &Tolerances,
) -> Result<CheckReport> {
    let path = || format!("checks[{index}]");
    let (lam, e) = (&p.sequence, &p.transform);
    let (d, n) = (lam.dim(), lam.term_count());
    let seed = |slot: u64, pinned: Option<u64>| check_seed(base_seed, index, slot, pinned);
    let matrix = |m: &MatrixSpec, slot: u64| at(path, build_matrix(m, d, seed(slot, matrix_seed(m))));
    let weights = |w: &WeightSpec, slot: u64| at(path, build_weights(w, n, seed(slot, weight_seed(w))));
    let gamma = |g: &SequenceSpec| at(path, build_sequence(g, lam, seed(0, sequence_seed(g))));
    let sample_seed = seed(SAMPLE_SLOT, None);

    let report = match spec {
        CheckSpec::FrameProperties { samples } => {
            theorems::check_frame_operator_properties(lam, e, *samples, sample_seed, tol)
        }
        CheckSpec::CanonicalDual { samples } => theorems::check_canonical_dual(lam, e, *samples, sample_seed, tol),
        CheckSpec::Perturbation {
            gamma: g,
            a,
            b,
            alpha,
            beta,
            assert_conclusion,
        } => {
            let gam = gamma(g)?;
            let (a, b) = (weights(a, 1)?, weights(b, 2)?);
            theorems::check_perturbation(lam, &gam, e, &a, &b, *alpha, *beta, tol).map(|v| {
                let mut r = v.to_report("perturbation");
                r.values.insert("alpha".into(), *alpha);
                r.values.insert("beta".into(), *beta);
                if *assert_conclusion {
                    r
                } else {
                    r.without_assertion()
                }
            })
        }
        CheckSpec::PerturbationSimple {
            gamma: g,
            alpha,
            assert_conclusion,
        } => {
            let gam = gamma(g)?;
            theorems::check_perturbation_simple(lam, &gam, e, *alpha, tol).map(|v| {
                let mut r = v.to_report("perturbation_simple");
                r.values.insert("alpha".into(), *alpha);
                if *assert_conclusion {
                    r
                } else {
                    r.without_assertion()
                }
            })
        }
        CheckSpec::UmFamily { u, m_max, side } => {
            let u = matrix(u, 3)?;
            theorems::check_um_family(lam, e, &u, *m_max, *side, tol).map(|entries| {
                let mut r = theorems::um_family_report(&entries, *side);
                r.values.insert("u_norm".into(), crate::numerics::operator_norm(&u));
                r
            })
        }
        CheckSpec::CompositionSelfadjoint { u } => {
            let u = matrix(u, 3)?;
            theorems::check_composition_selfadjoint(lam, e, &u, tol)
        }
        CheckSpec::InvSqrtParseval {} => theorems::check_inv_sqrt_parseval(lam, e, tol),
        CheckSpec::ClosedRange { u } => {
            let u = matrix(u, 3)?;
            let lam_u = at(path, lam.compose_right(&u))?;
            theorems::check_closed_range(&lam_u, e, &u, lam, tol)
        }
        CheckSpec::SumBessel {
            gamma: g,
            u1,
            u2,
            block_orthogonal,
        } => {
            let gam = gamma(g)?;
            let (u1, u2) = (matrix(u1, 4)?, matrix(u2, 5)?);
            let (l, g) = if *block_orthogonal {
                at(path, block_pair(lam, &gam))?
            } else {
                (lam.clone(), gam)
            };
            theorems::check_sum_bessel(&l, &g, e, &u1, &u2, tol)
        }
        CheckSpec::SumFrameCombos {
            gamma: g,
            a,
            b,
            block_orthogonal,
        } => {
            let gam = gamma(g)?;
            let (a, b) = (weights(a, 1)?, weights(b, 2)?);
            let (l, g) = if *block_orthogonal {
                at(path, block_pair(lam, &gam))?
            } else {
                (lam.clone(), gam)
            };
            theorems::check_sum_frame_combos(&l, &g, e, &a, &b, tol)
        }
        CheckSpec::DeltaBessel {} => theorems::check_delta_bessel(lam, tol),
        CheckSpec::InterleavedDelta {} => theorems::check_interleaved_delta(lam, tol),
    };
    at(path, report)
}

/// Command-line adjustments applied on top of a scenario.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RunOptions {
    pub seed: Option<u64>,
    pub tol_scale: f64,
    /// Store per-check wall time in the report (breaks byte-identical reruns).
    pub timings: bool,
}

impl Default for RunOptions {
    fn default() -> Self {
        Self {
            seed: None,
            tol_scale: 1.0,
            timings: false,
        }
    }
}

#[derive(Debug, Clone)]
pub struct RunOutcome {
    pub report: ReportFile,
    /// Wall time of every check in milliseconds, in check order.
    pub wall_times_ms: Vec<f64>,
}

/// Builds the scenario's objects without running any check.
pub fn validate_scenario(s: &ScenarioFile) -> Result<()> {
    let tol = s.tolerances;
    let p = prepare(s, &tol)?;
    let (d, n) = (s.dimension, s.terms);
    for (i, c) in s.checks.iter().enumerate() {
        let path = || format!("checks[{i}]");
        let seed = |slot, pinned| check_seed(s.seed, i, slot, pinned);
        match c {
            CheckSpec::Perturbation { gamma, a, b, .. } | CheckSpec::SumFrameCombos { gamma, a, b, .. } => {
                at(path, build_sequence(gamma, &p.sequence, seed(0, sequence_seed(gamma))))?;
                at(path, build_weights(a, n, seed(1, weight_seed(a))))?;
                at(path, build_weights(b, n, seed(2, weight_seed(b))))?;
            }
            CheckSpec::PerturbationSimple { gamma, .. } => {
                at(path, build_sequence(gamma, &p.sequence, seed(0, sequence_seed(gamma))))?;
            }
            CheckSpec::UmFamily { u, .. } | CheckSpec::CompositionSelfadjoint { u } | CheckSpec::ClosedRange { u } => {
                at(path, build_matrix(u, d, seed(3, matrix_seed(u))))?;
            }
            CheckSpec::SumBessel { gamma, u1, u2, .. } => {
                at(path, build_sequence(gamma, &p.sequence, seed(0, sequence_seed(gamma))))?;
                at(path, build_matrix(u1, d, seed(4, matrix_seed(u1))))?;
                at(path, build_matrix(u2, d, seed(5, matrix_seed(u2))))?;
            }
            CheckSpec::FrameProperties { .. }
            | CheckSpec::CanonicalDual { .. }
            | CheckSpec::InvSqrtParseval {}
            | CheckSpec::DeltaBessel {}
            | CheckSpec::InterleavedDelta {} => {}
        }
    }
    Ok(())
}

/// Runs every check of a scenario and assembles the report.
pub fn run_scenario(scenario: &ScenarioFile, opts: &RunOptions) -> Result<RunOutcome> {
    if !(opts.tol_scale.is_finite() && opts.tol_scale > 0.0) {
        return Err(Error::Scenario {
            path: "--tol-scale".into(),
            message: format!("must be a positive finite number, got {}", opts.tol_scale),
        });
    }
    let mut scenario = scenario.clone();
    if let Some(seed) = opts.seed {
        scenario.seed = seed;
    }
    let tol = scenario.tolerances.scaled(opts.tol_scale);
    let prepared = prepare(&scenario, &tol)?;
    let fr = frame_report(&prepared.sequence, &prepared.transform, &tol)?;
    let s = &fr.frame_operator;
    let frame = FrameSummary {
        lower_opt: fr.lower_opt,
        upper_opt: fr.upper_opt,
        classification: fr.classification,
        hermiticity_residual: fr.hermiticity_residual,
        frame_operator: (0..s.rows()).map(|i| s.row(i).to_vec()).collect(),
    };

    let mut checks = Vec::with_capacity(scenario.checks.len());
    let mut wall_times_ms = Vec::with_capacity(scenario.checks.len());
    for (i, spec) in scenario.checks.iter().enumerate() {
        let start = Instant::now();
        let report = run_check(spec, i, scenario.seed, &prepared, &tol)?;
        let ms = start.elapsed().as_secs_f64() * 1e3;
        wall_times_ms.push(ms);
        checks.push(CheckEntry {
            report,
            wall_time_ms: opts.timings.then_some(ms),
        });
    }
    Ok(RunOutcome {
        report: ReportFile::new(scenario, tol, frame, checks),
        wall_times_ms,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::io::{emit_report, parse_scenario};

    fn scenario(extra: &str) -> ScenarioFile {
        parse_scenario(&format!(
            r#"{{"schema_version": 1, "dimension": 3, "terms": 6, "seed": 5,
                "generator": {{"kind": "random_frame_functionals", "condition": 4}},
                "transform": {{"kind": "delta"}}{extra}}}"#
        ))
        .unwrap()
    }

    #[test]
    fn minimal_delta_scenario_bounds() {
        let s = parse_scenario(
            r#"{"schema_version": 1, "dimension": 2, "terms": 2,
                "generator": {"kind": "standard_basis_functionals"}, "transform": {"kind": "delta"}}"#,
        )
        .unwrap();
        let out = run_scenario(&s, &RunOptions::default()).unwrap();
        let f = &out.report.frame;
        let r5 = 5f64.sqrt();
        assert!((f.lower_opt - (3.0 - r5) / 2.0).abs() < 1e-12);
        assert!((f.upper_opt - (3.0 + r5) / 2.0).abs() < 1e-12);
        assert!(out.report.overall_pass);
        assert!(out.report.checks.is_empty());
    }

    #[test]
    fn all_check_kinds_run_and_pass() {
        let s = scenario(
            r#", "checks": [
                {"name": "frame_properties", "samples": 10},
                {"name": "canonical_dual", "samples": 10},
                {"name": "perturbation", "gamma": {"kind": "scaled", "factor": [1.1, 0]}, "a": {"kind": "constant", "value": [0.7, 0]}, "b": {"kind": "constant", "value": [0.7, 0]}, "alpha": 0.01},
                {"name": "perturbation_simple", "gamma": {"kind": "additive_noise", "scale": 0.001}, "alpha": 0.2},
                {"name": "composition_selfadjoint", "u": {"kind": "random_hpd", "lo": 0.5, "hi": 2}},
                {"name": "inv_sqrt_parseval"},
                {"name": "closed_range", "u": {"kind": "diag", "values": [1, 2, 3]}},
                {"name": "sum_bessel", "gamma": {"kind": "generated", "generator": {"kind": "random_frame_functionals"}}, "u1": {"kind": "scaled_identity", "value": [1, 0]}, "u2": {"kind": "random_hermitian", "norm": 0.5}},
                {"name": "sum_frame_combos", "gamma": {"kind": "generated", "generator": {"kind": "random_frame_functionals"}}, "a": {"kind": "random", "lo": 0.5, "hi": 2}},
                {"name": "delta_bessel"}
            ]"#,
        );
        let out = run_scenario(&s, &RunOptions::default()).unwrap();
        for c in &out.report.checks {
            assert!(c.report.passed, "{:?}", c.report);
        }
        assert!(out.report.overall_pass);
        assert_eq!(out.wall_times_ms.len(), 10);
        assert!(out.report.checks.iter().all(|c| c.wall_time_ms.is_none()));
    }

    #[test]
    fn reports_are_deterministic_and_seed_sensitive() {
        let s = scenario(r#", "checks": [{"name": "frame_properties", "samples": 5}]"#);
        let a = emit_report(&run_scenario(&s, &RunOptions::default()).unwrap().report);
        let b = emit_report(&run_scenario(&s, &RunOptions::default()).unwrap().report);
        assert_eq!(a, b);
        let opts = RunOptions {
            seed: Some(6),
            ..RunOptions::default()
        };
        let c = emit_report(&run_scenario(&s, &opts).unwrap().report);
        assert_ne!(a, c);
    }

    #[test]
    fn echoed_scenario_reparses() {
        let s = scenario(
            r#", "checks": [{"name": "um_family", "u": {"kind": "random_hermitian", "norm": 0.3}, "m_max": 2}]"#,
        );
        let text = emit_report(&run_scenario(&s, &RunOptions::default()).unwrap().report);
        let v: serde_json::Value = serde_json::from_str(&text).unwrap();
        let echoed = parse_scenario(&v["scenario"].to_string()).unwrap();
        assert_eq!(echoed, s);
    }

    #[test]
    fn failing_hypothesis_is_sound() {
        let s = scenario(
            r#", "checks": [{"name": "perturbation_simple", "gamma": {"kind": "additive_noise", "scale": 10}, "alpha": 0.1, "assert_conclusion": true}]"#,
        );
        let out = run_scenario(&s, &RunOptions::default()).unwrap();
        let r = &out.report.checks[0].report;
        assert!(!r.hypothesis_holds && r.passed);
        assert!(r.notes.iter().any(|n| n == "hypothesis not met, conclusion skipped"));
        assert!(out.report.overall_pass);
    }

    #[test]
    fn failed_check_fails_overall() {
        let s = scenario(r#", "checks": [{"name": "inv_sqrt_parseval"}, {"name": "frame_properties", "samples": 3}]"#);
        let opts = RunOptions {
            tol_scale: 1e-30,
            ..RunOptions::default()
        };
        let out = run_scenario(&s, &opts).unwrap();
        assert!(!out.report.overall_pass);
    }

    #[test]
    fn errors_are_classified() {
        let s = scenario(
            r#", "checks": [{"name": "perturbation_simple", "gamma": {"kind": "scaled", "factor": [1, 0]}, "alpha": 0.5}]"#,
        );
        let Err(Error::Scenario { path, .. }) = run_scenario(&s, &RunOptions::default()) else {
            panic!()
        };
        assert_eq!(path, "checks[0]");

        let s = scenario(r#", "checks": [{"name": "um_family", "u": {"kind": "scaled_identity", "value": [0.8, 0]}}]"#);
        assert!(matches!(
            run_scenario(&s, &RunOptions::default()),
            Err(Error::Precondition(_))
        ));

        let s = scenario(r#", "checks": [{"name": "closed_range", "u": {"kind": "diag", "values": [1, 2]}}]"#);
        assert!(matches!(validate_scenario(&s), Err(Error::Scenario { .. })));

        let s = parse_scenario(
            r#"{"schema_version": 1, "dimension": 2, "terms": 2, "generator": {"kind": "standard_basis_functionals"},
                "transform": {"kind": "dense", "entries": [[[1, 0], [1, 0]], [[1, 0], [1, 0]]]}, "transform_invertible": true}"#,
        )
        .unwrap();
        assert!(matches!(
            run_scenario(&s, &RunOptions::default()),
            Err(Error::Precondition(_))
        ));
    }
}
