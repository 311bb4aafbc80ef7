//! Verifiers for the E-g-frame results. Each decides its hypothesis exactly, as an
//! operator inequality or a rank condition, and compares the predicted bounds with the
//! measured sharp bounds.
//!
//! A verifier never asserts a conclusion whose hypothesis failed: the report
//! then carries `hypothesis_holds = false`, the margin, and `passed = true`.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::frames::{
    analysis, analysis_mixed, canonical_dual, classify_bounds, dual_of_dual_check, frame_bounds_with, frame_operator,
    reconstruct_columns, require_frame, synthesis, synthesis_mixed,
};
use crate::generators::{random_vector, rng_from_seed};
use crate::model::{stacked_norm_sq, Classification, OperatorSequence, StackedVector, WeightSequence};
use crate::numerics::{
    adjoint_mul, hermitian_eig_with, inv_sqrt_hpd_with, matmul, matpow, min_singular_value, operator_norm, range_basis,
    ComplexMatrix, C64, ONE,
};
use crate::tolerance::Tolerances;
use crate::transform::{apply_transform, make_delta, make_identity, TransformMatrix};

/// Outcome of one verifier, in a shape shared by every check.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CheckReport {
    pub name: String,
    pub hypothesis_holds: bool,
    /// Min eigenvalue of the slack operator, or the analogous scalar margin.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub hypothesis_margin: Option<f64>,
    pub conclusion_checked: bool,
    pub conclusion_holds: bool,
    pub passed: bool,
    pub values: BTreeMap<String, f64>,
    pub flags: BTreeMap<String, bool>,
    pub notes: Vec<String>,
}

impl CheckReport {
    fn new(name: &str) -> Self {
        Self {
            name: name.to_string(),
            hypothesis_holds: true,
            hypothesis_margin: None,
            conclusion_checked: false,
            conclusion_holds: false,
            passed: false,
            values: BTreeMap::new(),
            flags: BTreeMap::new(),
            notes: Vec::new(),
        }
    }

    fn value(&mut self, key: &str, v: f64) -> &mut Self {
        self.values.insert(key.to_string(), v);
        self
    }

    fn flag(&mut self, key: &str, v: bool) -> &mut Self {
        self.flags.insert(key.to_string(), v);
        self
    }

    /// Records the conclusion, honoring the hypothesis.
    fn conclude(mut self, holds: bool) -> Self {
        if self.hypothesis_holds {
            self.conclusion_checked = true;
            self.conclusion_holds = holds;
            self.passed = holds;
        } else {
            self.conclusion_checked = false;
            self.conclusion_holds = false;
            self.passed = true;
            self.notes.push("hypothesis not met, conclusion skipped".into());
        }
        self
    }

    /// Measures but does not assert the conclusion.
    pub fn without_assertion(mut self) -> Self {
        if self.conclusion_checked && !self.conclusion_holds {
            self.notes.push("conclusion failed but was not asserted".into());
        }
        self.passed = true;
        self
    }
}

fn check_same_shape(a: &OperatorSequence, b: &OperatorSequence, op: &'static str) -> Result<()> {
    if a.term_count() != b.term_count() || a.dim() != b.dim() || a.pad_dim() != b.pad_dim() {
        return Err(Error::shape(
            op,
            format!("N={}, d={}, p={}", a.term_count(), a.dim(), a.pad_dim()),
            format!("N={}, d={}, p={}", b.term_count(), b.dim(), b.pad_dim()),
        ));
    }
    Ok(())
}

fn check_square(u: &ComplexMatrix, d: usize, op: &'static str) -> Result<()> {
    if u.shape() != (d, d) {
        return Err(Error::shape(op, format!("({d}, {d})"), format!("{:?}", u.shape())));
    }
    Ok(())
}

fn containment_slack(tol: &Tolerances, scale: f64) -> f64 {
    tol.tol_check * scale.abs().max(1.0)
}

/// Result of testing the perturbation hypothesis and its predicted bounds.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PerturbationVerdict {
    pub hypothesis_holds: bool,
    pub hypothesis_margin: f64,
    pub predicted_lower: f64,
    pub predicted_upper: f64,
    pub measured_lower: f64,
    pub measured_upper: f64,
    pub contained: bool,
}

impl PerturbationVerdict {
    pub fn to_report(&self, name: &str) -> CheckReport {
        let mut r = CheckReport::new(name);
        r.hypothesis_holds = self.hypothesis_holds;
        r.hypothesis_margin = Some(self.hypothesis_margin);
        r.value("predicted_lower", self.predicted_lower)
            .value("predicted_upper", self.predicted_upper)
            .value("measured_lower", self.measured_lower)
            .value("measured_upper", self.measured_upper)
            .flag("contained", self.contained);
        r.conclude(self.contained)
    }
}

fn check_alpha(name: &str, v: f64) -> Result<()> {
    if !(0.0..0.5).contains(&v) {
        return Err(Error::Domain(format!("{name} = {v} outside [0, 1/2)")));
    }
    Ok(())
}

/// Perturbation of an E-g-frame with positively confined weights.
///
/// The hypothesis `Σ‖aₙMₙ^Λf − bₙMₙ^Γf‖² <= α Σ‖aₙMₙ^Λf‖² + β Σ‖bₙMₙ^Γf‖²` for all `f`
/// is decided as `D*D ⪯ αX*X + βY*Y` with `X`, `Y` the stacked weighted
/// analysis operators and `D = X − Y`.
#[allow(clippy::too_many_arguments)]
pub fn check_perturbation(
    lam: &OperatorSequence,
    gam: &OperatorSequence,
    e: &TransformMatrix,
    a: &WeightSequence,
    b: &WeightSequence,
    alpha: f64,
    beta: f64,
    tol: &Tolerances,
) -> Result<PerturbationVerdict> {
    check_alpha("alpha", alpha)?;
    check_alpha("beta", beta)?;
    check_same_shape(lam, gam, "check_perturbation")?;
    if a.len() != lam.term_count() || b.len() != lam.term_count() {
        return Err(Error::shape(
            "check_perturbation",
            format!("{} weights", lam.term_count()),
            format!("{} and {}", a.len(), b.len()),
        ));
    }
    let (_, a_opt, b_opt) = require_frame(lam, e, tol)?;

    let weighted_stack = |seq: &OperatorSequence, w: &WeightSequence| -> Result<ComplexMatrix> {
        let m = apply_transform(e, seq)?;
        let blocks: Vec<_> = m
            .operators()
            .iter()
            .zip(w.values())
            .map(|(mn, &c)| mn.scale(c))
            .collect();
        ComplexMatrix::vstack(&blocks)
    };
    let x = weighted_stack(lam, a)?;
    let y = weighted_stack(gam, b)?;
    let dmat = x.sub(&y)?;
    let xx = adjoint_mul(&x, &x)?.scale_real(alpha);
    let yy = adjoint_mul(&y, &y)?.scale_real(beta);
    let dd = adjoint_mul(&dmat, &dmat)?;
    let slack = xx.add(&yy)?.sub(&dd)?;
    let margin = hermitian_eig_with(&slack, tol)?.min();
    let scale = xx.frobenius_norm().max(yy.frobenius_norm()).max(dd.frobenius_norm());
    let hypothesis_holds = margin >= -tol.tol_hyp * scale;

    let (ia, sa) = (a.inf_abs(), a.sup_abs());
    let (ib, sb) = (b.inf_abs(), b.sup_abs());
    let predicted_lower = (1.0 - 2.0 * alpha) * ia * ia * a_opt / (2.0 * (1.0 + beta) * sb * sb);
    let predicted_upper = 2.0 * (1.0 + alpha) * sa * sa * b_opt / ((1.0 - 2.0 * beta) * ib * ib);

    let (measured_lower, measured_upper) = frame_bounds_with(gam, e, tol)?;
    let slack_c = containment_slack(tol, predicted_upper);
    let contained = predicted_lower - slack_c <= measured_lower && measured_upper <= predicted_upper + slack_c;
    Ok(PerturbationVerdict {
        hypothesis_holds,
        hypothesis_margin: margin,
        predicted_lower,
        predicted_upper,
        measured_lower,
        measured_upper,
        contained,
    })
}

/// The unweighted special case: `aₙ = bₙ = 1`, `β = 0`.
pub fn check_perturbation_simple(
    lam: &OperatorSequence,
    gam: &OperatorSequence,
    e: &TransformMatrix,
    alpha: f64,
    tol: &Tolerances,
) -> Result<PerturbationVerdict> {
    let ones = WeightSequence::ones(lam.term_count());
    check_perturbation(lam, gam, e, &ones, &ones, alpha, 0.0, tol)
}

/// Which side `U^m` multiplies `Λₙ` on.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum UmSide {
    /// `Λₙ + Λₙ·U^m`
    #[default]
    Right,
    /// `Λₙ + U^m·Λₙ`; needs `p = d` and every `Hₙ` invariant under `U`.
    Left,
}

#[derive(Debug, Clone, PartialEq)]
pub struct UmFamilyEntry {
    pub power: u32,
    pub verdict: PerturbationVerdict,
    pub classification: Classification,
}

/// Runs the unweighted perturbation check on `Γₙ = Λₙ + U^m Λₙ` (or `Λₙ U^m`) for `m = 1..=m_max`
/// with `α = ‖U‖^{2m}`.
pub fn check_um_family(
    lam: &OperatorSequence,
    e: &TransformMatrix,
    u: &ComplexMatrix,
    m_max: u32,
    side: UmSide,
    tol: &Tolerances,
) -> Result<Vec<UmFamilyEntry>> {
    if m_max == 0 {
        return Err(Error::Domain("m_max must be at least 1".into()));
    }
    let norm = operator_norm(u);
    if !(norm < std::f64::consts::FRAC_1_SQRT_2) {
        return Err(Error::Precondition(format!("‖U‖ = {norm} is not below √2/2")));
    }
    match side {
        UmSide::Right => check_square(u, lam.dim(), "check_um_family")?,
        UmSide::Left => {
            if lam.pad_dim() != lam.dim() {
                return Err(Error::Precondition(format!(
                    "left composition needs codomains inside the ambient space (p = {} != d = {})",
                    lam.pad_dim(),
                    lam.dim()
                )));
            }
            check_square(u, lam.dim(), "check_um_family")?;
            for (n, &dn) in lam.family().codomain_dims().iter().enumerate() {
                let leak = (dn..u.rows())
                    .flat_map(|i| (0..dn).map(move |j| (i, j)))
                    .map(|(i, j)| u[(i, j)].norm())
                    .fold(0.0, f64::max);
                if leak > tol.tol_orth * norm.max(1.0) {
                    return Err(Error::Precondition(format!(
                        "H_{} is not invariant under U (leak {leak:e})",
                        n + 1
                    )));
                }
            }
        }
    }
    require_frame(lam, e, tol)?;
    (1..=m_max)
        .map(|m| {
            let um = matpow(u, m)?;
            let gam = match side {
                UmSide::Right => lam.try_map(|_, op| op.add(&matmul(op, &um)?))?,
                UmSide::Left => lam.try_map(|_, op| op.add(&matmul(&um, op)?))?,
            };
            let alpha = norm.powi(2 * m as i32);
            let verdict = check_perturbation_simple(lam, &gam, e, alpha, tol)?;
            let classification = classify_bounds(verdict.measured_lower, verdict.measured_upper, tol.frame_rel);
            Ok(UmFamilyEntry {
                power: m,
                verdict,
                classification,
            })
        })
        .collect()
}

/// Folds a `U^m` family into one report; passes when every member is a frame and every
/// member whose hypothesis holds has contained bounds.
pub fn um_family_report(entries: &[UmFamilyEntry], side: UmSide) -> CheckReport {
    let mut r = CheckReport::new("um_family");
    let mut all_frames = true;
    let mut all_contained = true;
    let mut all_hyp = true;
    let mut min_margin = f64::INFINITY;
    for entry in entries {
        let m = entry.power;
        let v = &entry.verdict;
        r.value(&format!("m{m}_measured_lower"), v.measured_lower)
            .value(&format!("m{m}_measured_upper"), v.measured_upper)
            .value(&format!("m{m}_predicted_lower"), v.predicted_lower)
            .value(&format!("m{m}_predicted_upper"), v.predicted_upper)
            .value(&format!("m{m}_margin"), v.hypothesis_margin)
            .flag(&format!("m{m}_hypothesis_holds"), v.hypothesis_holds)
            .flag(&format!("m{m}_frame"), entry.classification.is_frame());
        all_frames &= entry.classification.is_frame();
        all_hyp &= v.hypothesis_holds;
        if v.hypothesis_holds {
            all_contained &= v.contained;
        }
        min_margin = min_margin.min(v.hypothesis_margin);
    }
    r.hypothesis_margin = Some(min_margin);
    r.flag("all_hypotheses_hold", all_hyp)
        .flag("all_frames", all_frames)
        .flag("left_composition", side == UmSide::Left);
    if !all_hyp {
        r.notes.push(
            "perturbation hypothesis with alpha = ‖U‖^(2m) not met for some m; containment asserted only where it holds"
                .into(),
        );
    }
    r.conclude(all_frames && all_contained)
}

fn hermitian_check(u: &ComplexMatrix, tol: &Tolerances) -> std::result::Result<(), String> {
    let asym = u.hermiticity_residual();
    if asym > tol.tol_herm * u.frobenius_norm().max(1.0) {
        return Err(format!("U is not self-adjoint: ‖U − U*‖_F = {asym:e}"));
    }
    Ok(())
}

/// `Λ` is a frame iff `ΛU` is, for self-adjoint injective `U`, with the lower bound
/// `A·‖(U⁻¹)*‖⁻²` for `ΛU`.
pub fn check_composition_selfadjoint(
    lam: &OperatorSequence,
    e: &TransformMatrix,
    u: &ComplexMatrix,
    tol: &Tolerances,
) -> Result<CheckReport> {
    check_square(u, lam.dim(), "check_composition_selfadjoint")?;
    hermitian_check(u, tol).map_err(Error::Precondition)?;
    let smin = min_singular_value(u);
    let smax = operator_norm(u);
    if !(smin > tol.tol_pd * smax.max(f64::MIN_POSITIVE)) {
        return Err(Error::Precondition(format!(
            "U is not injective: smallest singular value {smin:e}"
        )));
    }
    let lam_u = lam.compose_right(u)?;
    let (a, b) = frame_bounds_with(lam, e, tol)?;
    let (au, bu) = frame_bounds_with(&lam_u, e, tol)?;
    let lam_frame = classify_bounds(a, b, tol.frame_rel).is_frame();
    let lam_u_frame = classify_bounds(au, bu, tol.frame_rel).is_frame();
    // ‖(U⁻¹)*‖⁻¹ is the smallest singular value of U.
    let inv_adj_norm = 1.0 / smin;
    let predicted = a / (inv_adj_norm * inv_adj_norm);
    let bound_ok = !lam_frame || au >= predicted - containment_slack(tol, predicted);

    let mut r = CheckReport::new("composition_selfadjoint");
    r.hypothesis_margin = Some(smin);
    r.value("lower", a)
        .value("upper", b)
        .value("composed_lower", au)
        .value("composed_upper", bu)
        .value("inverse_adjoint_norm", inv_adj_norm)
        .value("predicted_composed_lower", predicted)
        .flag("frame", lam_frame)
        .flag("composed_frame", lam_u_frame)
        .flag("equivalence", lam_frame == lam_u_frame)
        .flag("lower_bound_route", bound_ok);
    r.notes
        .push("finite dimensions: injective self-adjoint U is invertible".into());
    Ok(r.conclude(lam_frame == lam_u_frame && bound_ok))
}

/// `{Λₙ S^{-1/2}}` has frame operator `I`.
pub fn check_inv_sqrt_parseval(lam: &OperatorSequence, e: &TransformMatrix, tol: &Tolerances) -> Result<CheckReport> {
    let (s, a, b) = require_frame(lam, e, tol)?;
    let r_half = inv_sqrt_hpd_with(&s, tol)?;
    let gam = lam.compose_right(&r_half)?;
    let s_gam = frame_operator(&gam, e)?;
    let residual = s_gam.sub(&ComplexMatrix::identity(lam.dim()))?.frobenius_norm();
    let (gl, gu) = frame_bounds_with(&gam, e, tol)?;
    let mut r = CheckReport::new("inv_sqrt_parseval");
    r.value("lower", a)
        .value("upper", b)
        .value("normalized_lower", gl)
        .value("normalized_upper", gu)
        .value("identity_residual", residual);
    Ok(r.conclude(residual <= tol.tol_check))
}

/// From `ΛU` a frame with `U` self-adjoint: `U` is injective and `Λ` is a frame with lower
/// bound at least `A(ΛU)·‖U‖⁻²`.
pub fn check_closed_range(
    lam_u: &OperatorSequence,
    e: &TransformMatrix,
    u: &ComplexMatrix,
    lam: &OperatorSequence,
    tol: &Tolerances,
) -> Result<CheckReport> {
    check_same_shape(lam, lam_u, "check_closed_range")?;
    check_square(u, lam.dim(), "check_closed_range")?;
    let mut r = CheckReport::new("closed_range");
    r.notes.push("finite dimensions: every range is closed".into());

    let composed = lam.compose_right(u)?;
    let mut mismatch = 0.0;
    let mut scale = 0.0;
    for (x, y) in composed.operators().iter().zip(lam_u.operators()) {
        mismatch += x.sub(y)?.norm_sq();
        scale += y.norm_sq();
    }
    let mismatch = mismatch.sqrt() / scale.sqrt().max(1.0);
    r.value("composition_mismatch", mismatch);

    let (au, bu) = frame_bounds_with(lam_u, e, tol)?;
    r.value("composed_lower", au).value("composed_upper", bu);
    let composed_frame = classify_bounds(au, bu, tol.frame_rel).is_frame();
    let herm = hermitian_check(u, tol);
    if let Err(msg) = &herm {
        r.notes.push(msg.clone());
    }
    if !composed_frame {
        r.notes.push("ΛU is not a frame".into());
    }
    if mismatch > tol.tol_check {
        r.notes.push("supplied ΛU does not match Λ·U".into());
    }
    r.hypothesis_holds = composed_frame && herm.is_ok() && mismatch <= tol.tol_check;
    r.hypothesis_margin = Some(au - tol.frame_rel * bu);

    let smin = min_singular_value(u);
    let norm = operator_norm(u);
    let injective = smin > tol.tol_pd * norm.max(f64::MIN_POSITIVE);
    let (a, b) = frame_bounds_with(lam, e, tol)?;
    let predicted = au / (norm * norm);
    let lam_frame = classify_bounds(a, b, tol.frame_rel).is_frame();
    let bound_ok = a >= predicted - containment_slack(tol, predicted);
    r.value("min_singular_value", smin)
        .value("operator_norm", norm)
        .value("lower", a)
        .value("upper", b)
        .value("predicted_lower", predicted)
        .flag("injective", injective)
        .flag("frame", lam_frame)
        .flag("lower_bound_route", bound_ok);
    Ok(r.conclude(injective && lam_frame && bound_ok))
}

/// Rank threshold for computed range bases, relative to the largest squared singular value.
const RANGE_RANK_REL: f64 = 1e-12;

/// Largest principal-angle cosine between `R(Λₙ)` and `R(Γₙ)` over all `n`, with its index.
pub fn max_range_overlap(lam: &OperatorSequence, gam: &OperatorSequence) -> Result<(f64, usize)> {
    check_same_shape(lam, gam, "max_range_overlap")?;
    let mut worst = (0.0, 0);
    for (n, (x, y)) in lam.operators().iter().zip(gam.operators()).enumerate() {
        let qx = range_basis(x, RANGE_RANK_REL);
        let qy = range_basis(y, RANGE_RANK_REL);
        if qx.cols() == 0 || qy.cols() == 0 {
            continue;
        }
        let overlap = operator_norm(&adjoint_mul(&qx, &qy)?);
        if overlap > worst.0 {
            worst = (overlap, n + 1);
        }
    }
    Ok(worst)
}

fn require_orthogonal(lam: &OperatorSequence, gam: &OperatorSequence, tol: &Tolerances) -> Result<f64> {
    let (overlap, index) = max_range_overlap(lam, gam)?;
    if overlap > tol.tol_orth {
        return Err(Error::Orthogonality { overlap, index });
    }
    Ok(overlap)
}

/// `{Λₙ U₁ + Γₙ U₂}` is Bessel with bound `B₁‖U₁‖² + B₂‖U₂‖²` when `R(Λₙ) ⟂ R(Γₙ)`.
pub fn check_sum_bessel(
    lam: &OperatorSequence,
    gam: &OperatorSequence,
    e: &TransformMatrix,
    u1: &ComplexMatrix,
    u2: &ComplexMatrix,
    tol: &Tolerances,
) -> Result<CheckReport> {
    check_same_shape(lam, gam, "check_sum_bessel")?;
    check_square(u1, lam.dim(), "check_sum_bessel")?;
    check_square(u2, lam.dim(), "check_sum_bessel")?;
    let overlap = require_orthogonal(lam, gam, tol)?;

    let (a1, b1) = frame_bounds_with(lam, e, tol)?;
    let (_, b2) = frame_bounds_with(gam, e, tol)?;
    let lam_frame = classify_bounds(a1, b1, tol.frame_rel).is_frame();
    let sum = lam.compose_right(u1)?.combine(ONE, &gam.compose_right(u2)?, ONE)?;
    let (_, b_sum) = frame_bounds_with(&sum, e, tol)?;
    let (n1, n2) = (operator_norm(u1), operator_norm(u2));
    let predicted = b1 * n1 * n1 + b2 * n2 * n2;

    let mut r = CheckReport::new("sum_bessel");
    r.hypothesis_holds = lam_frame;
    r.hypothesis_margin = Some(tol.tol_orth - overlap);
    r.value("range_overlap", overlap)
        .value("lambda_upper", b1)
        .value("gamma_upper", b2)
        .value("sum_upper", b_sum)
        .value("predicted_upper", predicted);
    Ok(r.conclude(b_sum <= predicted + containment_slack(tol, predicted)))
}

/// `Λ ± Γ` and `aΛ + bΓ` are frames when `R(Λₙ) ⟂ R(Γₙ)`.
pub fn check_sum_frame_combos(
    lam: &OperatorSequence,
    gam: &OperatorSequence,
    e: &TransformMatrix,
    a: &WeightSequence,
    b: &WeightSequence,
    tol: &Tolerances,
) -> Result<CheckReport> {
    check_same_shape(lam, gam, "check_sum_frame_combos")?;
    let overlap = require_orthogonal(lam, gam, tol)?;
    let (a1, b1) = frame_bounds_with(lam, e, tol)?;
    let lam_frame = classify_bounds(a1, b1, tol.frame_rel).is_frame();

    let plus = lam.combine(ONE, gam, ONE)?;
    let minus = lam.combine(ONE, gam, -ONE)?;
    let weighted = lam.weighted(a)?.combine(ONE, &gam.weighted(b)?, ONE)?;
    let mut r = CheckReport::new("sum_frame_combos");
    r.hypothesis_holds = lam_frame;
    r.hypothesis_margin = Some(tol.tol_orth - overlap);
    r.value("range_overlap", overlap)
        .value("lambda_lower", a1)
        .value("lambda_upper", b1);
    let mut all = true;
    for (label, seq) in [("plus", &plus), ("minus", &minus), ("weighted", &weighted)] {
        let (lo, hi) = frame_bounds_with(seq, e, tol)?;
        let is_frame = classify_bounds(lo, hi, tol.frame_rel).is_frame();
        r.value(&format!("{label}_lower"), lo)
            .value(&format!("{label}_upper"), hi)
            .flag(&format!("{label}_frame"), is_frame);
        all &= is_frame;
    }
    Ok(r.conclude(all))
}

/// Under the difference matrix the upper bound is at most `4B`, `B` the identity-transform bound.
pub fn check_delta_bessel(lam: &OperatorSequence, tol: &Tolerances) -> Result<CheckReport> {
    let n = lam.term_count();
    let (_, b) = frame_bounds_with(lam, &make_identity(n)?, tol)?;
    let (dl, du) = frame_bounds_with(lam, &make_delta(n)?, tol)?;
    let mut r = CheckReport::new("delta_bessel");
    r.value("upper", b)
        .value("delta_lower", dl)
        .value("delta_upper", du)
        .value("four_upper", 4.0 * b);
    Ok(r.conclude(du <= 4.0 * b + containment_slack(tol, b)))
}

/// Interleaved sequence `(Λ₁, 0, Λ₂, 0, …)` under the difference matrix: bounds inside
/// `[A, 2B]` and, sharply, equal to `(2A, 2B)`.
pub fn check_interleaved_delta(seq: &OperatorSequence, tol: &Tolerances) -> Result<CheckReport> {
    let n = seq.term_count();
    if !n.is_multiple_of(2) {
        return Err(Error::Precondition(format!(
            "interleaved sequence needs an even number of terms (got {n})"
        )));
    }
    if let Some(k) = (1..n).step_by(2).find(|&k| seq.operator(k).max_abs() != 0.0) {
        return Err(Error::Precondition(format!(
            "term {} of an interleaved sequence is not zero",
            k + 1
        )));
    }
    let base_ops: Vec<_> = (0..n).step_by(2).map(|k| seq.operator(k).clone()).collect();
    let dims: Vec<_> = (0..n).step_by(2).map(|k| seq.family().codomain_dims()[k]).collect();
    let base = OperatorSequence::new(seq.space(), crate::model::SubspaceFamily::new(dims)?, base_ops)?;
    let (a, b) = frame_bounds_with(&base, &make_identity(n / 2)?, tol)?;
    let (ia, ib) = frame_bounds_with(seq, &make_identity(n)?, tol)?;
    let (dl, du) = frame_bounds_with(seq, &make_delta(n)?, tol)?;
    let slack = containment_slack(tol, b);
    let same_bounds = (ia - a).abs() <= slack && (ib - b).abs() <= slack;
    let contained = dl >= a - slack && du <= 2.0 * b + slack;
    let sharp = (dl - 2.0 * a).abs() <= slack && (du - 2.0 * b).abs() <= slack;

    let mut r = CheckReport::new("interleaved_delta");
    r.value("base_lower", a)
        .value("base_upper", b)
        .value("interleaved_lower", ia)
        .value("interleaved_upper", ib)
        .value("delta_lower", dl)
        .value("delta_upper", du)
        .flag("same_bounds_without_transform", same_bounds)
        .flag("claimed_interval_contains", contained)
        .flag("sharp_double_bounds", sharp);
    Ok(r.conclude(same_bounds && contained && sharp))
}

fn random_stacked(seq: &OperatorSequence, rng: &mut crate::generators::SeededRng) -> Result<StackedVector> {
    StackedVector::new(
        (0..seq.term_count())
            .map(|n| {
                let dn = seq.family().codomain_dims()[n];
                let v = random_vector(seq.pad_dim(), rng);
                ComplexMatrix::from_fn(
                    seq.pad_dim(),
                    1,
                    |i, _| if i < dn { v[(i, 0)] } else { C64::new(0.0, 0.0) },
                )
            })
            .collect(),
    )
}

/// Hermiticity, positivity, spectral bracketing, adjointness and `S = T T*` on sampled vectors.
pub fn check_frame_operator_properties(
    seq: &OperatorSequence,
    e: &TransformMatrix,
    samples: usize,
    seed: u64,
    tol: &Tolerances,
) -> Result<CheckReport> {
    let s = frame_operator(seq, e)?;
    let s_norm = s.frobenius_norm();
    let herm = s.hermiticity_residual();
    let eig = hermitian_eig_with(&s, tol)?;
    let (lo, hi) = (eig.min(), eig.max());
    let psd = lo >= -tol.tol_identity * hi.abs().max(f64::MIN_POSITIVE);

    let mixed = apply_transform(e, seq)?;
    let mut rng = rng_from_seed(seed);
    let mut worst_bracket = 0.0f64;
    let mut worst_adjoint = 0.0f64;
    for _ in 0..samples {
        let f = random_vector(seq.dim(), &mut rng);
        let nf = f.norm_sq();
        let tf = analysis_mixed(&mixed, &f)?;
        let q = stacked_norm_sq(&tf);
        let below = (lo * nf - q) / (hi.abs().max(f64::MIN_POSITIVE) * nf);
        let above = (q - hi * nf) / (hi.abs().max(f64::MIN_POSITIVE) * nf);
        worst_bracket = worst_bracket.max(below).max(above);

        let v = random_stacked(seq, &mut rng)?;
        let lhs = synthesis_mixed(&mixed, &v)?.inner(&f)?;
        let rhs = v.inner(&tf)?;
        let vn = crate::model::stacked_norm_sq(&v).sqrt();
        worst_adjoint = worst_adjoint.max((lhs - rhs).norm() / (vn * nf.sqrt()).max(f64::MIN_POSITIVE));
    }

    // Columns of T T* applied to the standard basis.
    let d = seq.dim();
    let mut tt = ComplexMatrix::zeros(d, d);
    for j in 0..d {
        let ej = ComplexMatrix::from_fn(d, 1, |i, _| if i == j { ONE } else { C64::new(0.0, 0.0) });
        let col = synthesis(seq, e, &analysis(seq, e, &ej)?)?;
        for i in 0..d {
            tt[(i, j)] = col[(i, 0)];
        }
    }
    let factorization = tt.sub(&s)?.frobenius_norm() / s_norm.max(1.0);

    let herm_ok = herm <= tol.tol_identity * s_norm.max(1.0);
    let bracket_ok = worst_bracket <= tol.tol_identity;
    let adjoint_ok = worst_adjoint <= tol.tol_identity;
    let factor_ok = factorization <= tol.tol_identity;
    let mut r = CheckReport::new("frame_properties");
    r.value("lower", lo)
        .value("upper", hi)
        .value("hermiticity_residual", herm)
        .value("bracketing_violation", worst_bracket)
        .value("adjointness_residual", worst_adjoint)
        .value("factorization_residual", factorization)
        .value("samples", samples as f64)
        .flag("hermitian", herm_ok)
        .flag("positive_semidefinite", psd)
        .flag("bracketing", bracket_ok)
        .flag("adjointness", adjoint_ok)
        .flag("factorization", factor_ok);
    Ok(r.conclude(herm_ok && psd && bracket_ok && adjoint_ok && factor_ok))
}

/// Canonical dual bounds `(1/B, 1/A)`, reconstruction on sampled vectors, and dual-of-dual residuals.
pub fn check_canonical_dual(
    seq: &OperatorSequence,
    e: &TransformMatrix,
    samples: usize,
    seed: u64,
    tol: &Tolerances,
) -> Result<CheckReport> {
    let (_, a, b) = require_frame(seq, e, tol)?;
    let pair = canonical_dual(seq, e, tol)?;
    let (dl, du) = frame_bounds_with(&pair.dual, e, tol)?;
    let rel_lower = (dl - 1.0 / b).abs() * b;
    let rel_upper = (du - 1.0 / a).abs() * a;
    let duality = dual_of_dual_check(&pair, e, tol)?;

    let mut rng = rng_from_seed(seed);
    let cols: Vec<ComplexMatrix> = (0..samples).map(|_| random_vector(seq.dim(), &mut rng)).collect();
    let fs = ComplexMatrix::from_fn(seq.dim(), samples, |i, j| cols[j][(i, 0)]);
    let gs = reconstruct_columns(seq, e, &fs, tol)?;
    let mut worst_recon = 0.0f64;
    for (j, f) in cols.iter().enumerate() {
        let err = (0..seq.dim())
            .map(|i| (gs[(i, j)] - f[(i, 0)]).norm_sqr())
            .sum::<f64>()
            .sqrt();
        worst_recon = worst_recon.max(err / f.frobenius_norm());
    }
    let bounds_ok = rel_lower <= tol.tol_check && rel_upper <= tol.tol_check;
    let recon_ok = worst_recon <= tol.tol_check;
    let mut r = CheckReport::new("canonical_dual");
    r.value("lower", a)
        .value("upper", b)
        .value("dual_lower", dl)
        .value("dual_upper", du)
        .value("dual_lower_rel_error", rel_lower)
        .value("dual_upper_rel_error", rel_upper)
        .value("inverse_residual", duality.inverse_residual)
        .value("recovery_residual", duality.recovery_residual)
        .value("reconstruction_residual", worst_recon)
        .flag("dual_bounds", bounds_ok)
        .flag("reconstruction", recon_ok)
        .flag("dual_of_dual", duality.passed);
    Ok(r.conclude(bounds_ok && recon_ok && duality.passed))
}
