//! Analysis and synthesis operators, the E-g-frame operator, sharp bounds,
//! classification, canonical duals and reconstruction.
//!
//! With `Mₙ = Σₖ E_{n,k} Λₖ` the analysis operator is `f ↦ {Mₙ f}`, the
//! synthesis operator is `{vₙ} ↦ Σₙ Mₙ* vₙ`, and the frame operator is
//! `S = Σₙ Mₙ* Mₙ`. In finite dimensions the sharp frame bounds are the
//! extreme eigenvalues of `S`.

use crate::error::{Error, Result};
use crate::generators::gen_functional_sequence;
use crate::model::{Classification, FrameReport, OperatorSequence, StackedVector};
use crate::numerics::{adjoint_mul, hermitian_eig_with, matmul, solve_hpd_with, ComplexMatrix, ONE};
use crate::tolerance::Tolerances;
use crate::transform::{apply_transform, make_identity, TransformMatrix, TransformedSequence};

fn check_vector(seq: &OperatorSequence, f: &ComplexMatrix, op: &'static str) -> Result<()> {
    if f.shape() != (seq.dim(), 1) {
        return Err(Error::shape(
            op,
            format!("({}, 1)", seq.dim()),
            format!("{:?}", f.shape()),
        ));
    }
    Ok(())
}

/// `{Σⱼ E_{n,j} Λⱼ f}ₙ`
pub fn analysis(seq: &OperatorSequence, e: &TransformMatrix, f: &ComplexMatrix) -> Result<StackedVector> {
    check_vector(seq, f, "analysis")?;
    analysis_mixed(&apply_transform(e, seq)?, f)
}

/// Analysis for an already mixed sequence `{Mₙ}`.
pub fn analysis_mixed(m: &TransformedSequence, f: &ComplexMatrix) -> Result<StackedVector> {
    let blocks = m
        .operators()
        .iter()
        .map(|mn| matmul(mn, f))
        .collect::<Result<Vec<_>>>()?;
    StackedVector::new(blocks)
}

/// `Σₙ Σₖ conj(E_{n,k}) Λₖ* vₙ = Σₙ Mₙ* vₙ`
pub fn synthesis(seq: &OperatorSequence, e: &TransformMatrix, v: &StackedVector) -> Result<ComplexMatrix> {
    if v.len() != seq.term_count() {
        return Err(Error::shape(
            "synthesis",
            format!("{} blocks", seq.term_count()),
            v.len(),
        ));
    }
    synthesis_mixed(&apply_transform(e, seq)?, v)
}

/// Synthesis for an already mixed sequence `{Mₙ}`.
pub fn synthesis_mixed(m: &TransformedSequence, v: &StackedVector) -> Result<ComplexMatrix> {
    let ops = m.operators();
    if v.len() != ops.len() {
        return Err(Error::shape("synthesis", format!("{} blocks", ops.len()), v.len()));
    }
    let (p, d) = ops.first().map_or((0, 0), ComplexMatrix::shape);
    let mut out = ComplexMatrix::zeros(d, 1);
    for (mn, block) in ops.iter().zip(v.blocks()) {
        if block.shape() != (p, 1) {
            return Err(Error::shape(
                "synthesis",
                format!("blocks of shape ({p}, 1)"),
                format!("{:?}", block.shape()),
            ));
        }
        out.axpy(ONE, &adjoint_mul(mn, block)?)?;
    }
    Ok(out)
}

/// `S = Σₙ Mₙ* Mₙ`, accumulated over `n` ascending.
pub fn frame_operator(seq: &OperatorSequence, e: &TransformMatrix) -> Result<ComplexMatrix> {
    let m = apply_transform(e, seq)?;
    let mut s = ComplexMatrix::zeros(seq.dim(), seq.dim());
    for mn in m.operators() {
        s.axpy(ONE, &adjoint_mul(mn, mn)?)?;
    }
    Ok(s)
}

/// Sharp `(lower, upper)` bounds: extreme eigenvalues of the frame operator.
pub fn frame_bounds(seq: &OperatorSequence, e: &TransformMatrix) -> Result<(f64, f64)> {
    frame_bounds_with(seq, e, &Tolerances::default())
}

pub fn frame_bounds_with(seq: &OperatorSequence, e: &TransformMatrix, tol: &Tolerances) -> Result<(f64, f64)> {
    let s = frame_operator(seq, e)?;
    spectral_bounds(&s, tol)
}

fn spectral_bounds(s: &ComplexMatrix, tol: &Tolerances) -> Result<(f64, f64)> {
    let eig = hermitian_eig_with(s, tol)?;
    Ok((eig.min(), eig.max()))
}

/// Classification from sharp bounds.
///
/// `rel` is relative to the upper bound: frame iff `lower > rel·upper`,
/// tight iff additionally `upper − lower <= rel·upper`, Parseval iff tight and
/// `|upper − 1| <= rel`.
pub fn classify_bounds(lower: f64, upper: f64, rel: f64) -> Classification {
    if !lower.is_finite() || !upper.is_finite() {
        return Classification::NotBesselGuard;
    }
    if !(upper > 0.0) || !(lower > rel * upper) {
        return Classification::BesselOnly;
    }
    if upper - lower <= rel * upper {
        if (upper - 1.0).abs() <= rel {
            Classification::Parseval
        } else {
            Classification::Tight
        }
    } else {
        Classification::Frame
    }
}

pub fn classify(seq: &OperatorSequence, e: &TransformMatrix, tol: &Tolerances) -> Result<Classification> {
    let any_nonfinite = seq.operators().iter().any(|op| !op.is_finite()) || !e.entries().is_finite();
    if any_nonfinite {
        return Ok(Classification::NotBesselGuard);
    }
    let (lo, hi) = frame_bounds_with(seq, e, tol)?;
    Ok(classify_bounds(lo, hi, tol.frame_rel))
}

/// Frame operator, sharp bounds and classification in one pass.
pub fn frame_report(seq: &OperatorSequence, e: &TransformMatrix, tol: &Tolerances) -> Result<FrameReport> {
    let s = frame_operator(seq, e)?;
    let hermiticity_residual = s.hermiticity_residual();
    let (lower_opt, upper_opt) = spectral_bounds(&s, tol)?;
    Ok(FrameReport {
        classification: classify_bounds(lower_opt, upper_opt, tol.frame_rel),
        frame_operator: s,
        lower_opt,
        upper_opt,
        hermiticity_residual,
    })
}

/// Frame operator of a sequence that must be a frame, plus its bounds.
pub(crate) fn require_frame(
    seq: &OperatorSequence,
    e: &TransformMatrix,
    tol: &Tolerances,
) -> Result<(ComplexMatrix, f64, f64)> {
    let s = frame_operator(seq, e)?;
    let (lo, hi) = spectral_bounds(&s, tol)?;
    let frame_tol = tol.frame_rel * hi;
    if !(hi > 0.0) || !(lo > frame_tol) {
        return Err(Error::NotAFrame {
            lower: lo,
            tol: frame_tol,
        });
    }
    Ok((s, lo, hi))
}

/// A frame together with its canonical dual `Λ̃ₙ = Λₙ S⁻¹`.
#[derive(Debug, Clone)]
pub struct DualPair {
    pub primal: OperatorSequence,
    pub dual: OperatorSequence,
    pub dual_frame_operator: ComplexMatrix,
}

pub fn canonical_dual(seq: &OperatorSequence, e: &TransformMatrix, tol: &Tolerances) -> Result<DualPair> {
    let (s, _, _) = require_frame(seq, e, tol)?;
    // S⁻¹ column by column; S is Hermitian so Λ S⁻¹ = (S⁻¹ Λ*)*.
    let s_inv = solve_hpd_with(&s, &ComplexMatrix::identity(seq.dim()), tol)?;
    let dual = seq.compose_right(&s_inv)?;
    let dual_frame_operator = frame_operator(&dual, e)?;
    Ok(DualPair {
        primal: seq.clone(),
        dual,
        dual_frame_operator,
    })
}

/// `Σₙ Σₖ Σⱼ conj(E_{n,k}) E_{n,j} Λₖ* Λⱼ S⁻¹ f`, evaluated as synthesis of the analysis of `S⁻¹f`.
pub fn reconstruct(
    seq: &OperatorSequence,
    e: &TransformMatrix,
    f: &ComplexMatrix,
    tol: &Tolerances,
) -> Result<ComplexMatrix> {
    check_vector(seq, f, "reconstruct")?;
    reconstruct_columns(seq, e, f, tol)
}

/// [`reconstruct`] applied to every column of `fs` (`d × k`) with one factorization of `S`.
pub fn reconstruct_columns(
    seq: &OperatorSequence,
    e: &TransformMatrix,
    fs: &ComplexMatrix,
    tol: &Tolerances,
) -> Result<ComplexMatrix> {
    if fs.rows() != seq.dim() {
        return Err(Error::shape(
            "reconstruct_columns",
            format!("{} rows", seq.dim()),
            format!("{:?}", fs.shape()),
        ));
    }
    let (s, _, _) = require_frame(seq, e, tol)?;
    let g = solve_hpd_with(&s, fs, tol)?;
    let t = apply_transform(e, seq)?.stacked();
    matmul(&t.adjoint(), &matmul(&t, &g)?)
}

#[derive(Debug, Clone, PartialEq)]
pub struct DualityReport {
    /// `‖S̃·S − I‖_F`
    pub inverse_residual: f64,
    /// `sqrt(Σₙ ‖Λ̃ₙ S̃⁻¹ − Λₙ‖²_F) / max(1, sqrt(Σₙ ‖Λₙ‖²_F))`
    pub recovery_residual: f64,
    pub passed: bool,
}

/// Checks `S̃ = S⁻¹` and that the dual of the dual gives back the primal.
pub fn dual_of_dual_check(pair: &DualPair, e: &TransformMatrix, tol: &Tolerances) -> Result<DualityReport> {
    let s = frame_operator(&pair.primal, e)?;
    let s_dual = frame_operator(&pair.dual, e)?;
    let d = s.rows();
    let inverse_residual = matmul(&s_dual, &s)?.sub(&ComplexMatrix::identity(d))?.frobenius_norm();

    let s_dual_inv = solve_hpd_with(&s_dual, &ComplexMatrix::identity(d), tol)?;
    let recovered = pair.dual.compose_right(&s_dual_inv)?;
    let mut diff = 0.0;
    let mut scale = 0.0;
    for (r, p) in recovered.operators().iter().zip(pair.primal.operators()) {
        diff += r.sub(p)?.norm_sq();
        scale += p.norm_sq();
    }
    let recovery_residual = diff.sqrt() / scale.sqrt().max(1.0);
    Ok(DualityReport {
        inverse_residual,
        recovery_residual,
        passed: inverse_residual <= tol.tol_check && recovery_residual <= tol.tol_check,
    })
}

/// Bounds of the E-frame `{fₖ}`: the functionals `f ↦ ⟨f, Σₖ E_{n,k} fₖ⟩` under the identity.
pub fn e_frame_bounds(vectors: &[ComplexMatrix], e: &TransformMatrix, tol: &Tolerances) -> Result<(f64, f64)> {
    if vectors.len() != e.size() {
        return Err(Error::shape(
            "e_frame_bounds",
            format!("{} vectors", e.size()),
            vectors.len(),
        ));
    }
    let d = vectors.first().map_or(0, ComplexMatrix::rows);
    let mixed = (0..e.size())
        .map(|n| {
            let mut g = ComplexMatrix::zeros(d, 1);
            for (k, fk) in vectors.iter().enumerate() {
                g.axpy(e.entry(n, k), fk)?;
            }
            Ok(g)
        })
        .collect::<Result<Vec<_>>>()?;
    let seq = gen_functional_sequence(&mixed)?;
    frame_bounds_with(&seq, &make_identity(e.size())?, tol)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::stacked_norm_sq;
    use crate::numerics::C64;
    use crate::transform::{make_delta, make_dense};

    fn basis_functionals(d: usize) -> OperatorSequence {
        let vecs: Vec<_> = (0..d)
            .map(|i| ComplexMatrix::from_fn(d, 1, |r, _| if r == i { ONE } else { C64::new(0.0, 0.0) }))
            .collect();
        gen_functional_sequence(&vecs).unwrap()
    }

    fn tol() -> Tolerances {
        Tolerances::default()
    }

    #[test]
    fn analysis_of_basis_functionals_returns_coordinates() {
        let seq = basis_functionals(3);
        let f = ComplexMatrix::column(&[C64::new(1.0, 2.0), C64::new(-3.0, 0.0), C64::new(0.0, 0.5)]);
        let v = analysis(&seq, &make_identity(3).unwrap(), &f).unwrap();
        for (n, b) in v.blocks().iter().enumerate() {
            assert_eq!(b[(0, 0)], f[(n, 0)]);
        }
        let z = analysis(&seq, &make_identity(3).unwrap(), &ComplexMatrix::zeros(3, 1)).unwrap();
        assert_eq!(stacked_norm_sq(&z), 0.0);
    }

    #[test]
    fn synthesis_inverts_orthonormal_analysis() {
        let seq = basis_functionals(3);
        let e = make_identity(3).unwrap();
        let f = ComplexMatrix::real_column(&[0.3, -1.0, 2.0]);
        assert_eq!(synthesis(&seq, &e, &analysis(&seq, &e, &f).unwrap()).unwrap(), f);
        let zero = synthesis(&seq, &e, &StackedVector::zeros(3, 1)).unwrap();
        assert_eq!(zero, ComplexMatrix::zeros(3, 1));
    }

    #[test]
    fn delta_frame_operator_by_hand() {
        // M₁ = e₁*, M₂ = e₂* − e₁*
        let s = frame_operator(&basis_functionals(2), &make_delta(2).unwrap()).unwrap();
        let expect = ComplexMatrix::from_real_rows(&[&[2.0, -1.0], &[-1.0, 1.0]]).unwrap();
        assert_eq!(s, expect);
        let (lo, hi) = frame_bounds(&basis_functionals(2), &make_delta(2).unwrap()).unwrap();
        let s5 = 5f64.sqrt();
        assert!((lo - (3.0 - s5) / 2.0).abs() < 1e-14);
        assert!((hi - (3.0 + s5) / 2.0).abs() < 1e-14);
    }

    #[test]
    fn scalar_frame_operator() {
        let seq = OperatorSequence::from_operators(vec![ComplexMatrix::from_real_rows(&[&[2.0]]).unwrap()]).unwrap();
        let s = frame_operator(&seq, &make_identity(1).unwrap()).unwrap();
        assert_eq!(s[(0, 0)], C64::new(4.0, 0.0));
    }

    #[test]
    fn two_times_identity_scales_operator_by_four() {
        let seq = basis_functionals(3);
        let e2 = make_dense(ComplexMatrix::identity(3).scale_real(2.0)).unwrap();
        let s = frame_operator(&seq, &e2).unwrap();
        assert_eq!(s, ComplexMatrix::identity(3).scale_real(4.0));
    }

    #[test]
    fn classify_examples() {
        let t = tol();
        let e = make_identity(3).unwrap();
        assert_eq!(
            classify(&basis_functionals(3), &e, &t).unwrap(),
            Classification::Parseval
        );

        let mut ops = basis_functionals(3).operators().to_vec();
        ops[2] = ComplexMatrix::zeros(1, 3);
        let dropped = OperatorSequence::from_operators(ops).unwrap();
        assert_eq!(classify(&dropped, &e, &t).unwrap(), Classification::BesselOnly);

        let tight = basis_functionals(3).scaled(C64::new(0.0, 2.0));
        assert_eq!(classify(&tight, &e, &t).unwrap(), Classification::Tight);

        assert_eq!(classify_bounds(0.5, 2.0, 1e-10), Classification::Frame);
        assert_eq!(classify_bounds(f64::NAN, 2.0, 1e-10), Classification::NotBesselGuard);
        assert_eq!(classify_bounds(0.0, 0.0, 1e-10), Classification::BesselOnly);
    }

    #[test]
    fn tight_dual_divides_by_bound() {
        let seq = basis_functionals(2).scaled(C64::new(3.0, 0.0));
        let e = make_identity(2).unwrap();
        let pair = canonical_dual(&seq, &e, &tol()).unwrap();
        for (d, p) in pair.dual.operators().iter().zip(seq.operators()) {
            assert!(d.sub(&p.scale_real(1.0 / 9.0)).unwrap().frobenius_norm() < 1e-15);
        }
        let r = dual_of_dual_check(&pair, &e, &tol()).unwrap();
        assert!(r.passed);
        assert!(
            pair.dual_frame_operator
                .sub(&ComplexMatrix::identity(2).scale_real(1.0 / 9.0))
                .unwrap()
                .frobenius_norm()
                < 1e-15
        );
    }

    #[test]
    fn parseval_dual_is_primal() {
        let seq = basis_functionals(3);
        let e = make_identity(3).unwrap();
        let pair = canonical_dual(&seq, &e, &tol()).unwrap();
        assert_eq!(pair.dual, seq);
        let r = dual_of_dual_check(&pair, &e, &tol()).unwrap();
        assert!(r.inverse_residual < 1e-12 && r.recovery_residual < 1e-12);
    }

    #[test]
    fn dual_of_non_frame_is_an_error() {
        let mut ops = basis_functionals(2).operators().to_vec();
        ops[1] = ComplexMatrix::zeros(1, 2);
        let seq = OperatorSequence::from_operators(ops).unwrap();
        let e = make_identity(2).unwrap();
        assert!(matches!(canonical_dual(&seq, &e, &tol()), Err(Error::NotAFrame { .. })));
        let f = ComplexMatrix::real_column(&[1.0, 1.0]);
        assert!(matches!(
            reconstruct(&seq, &e, &f, &tol()),
            Err(Error::NotAFrame { .. })
        ));
    }

    #[test]
    fn reconstruct_zero_and_delta() {
        let seq = basis_functionals(2);
        let e = make_delta(2).unwrap();
        let z = reconstruct(&seq, &e, &ComplexMatrix::zeros(2, 1), &tol()).unwrap();
        assert_eq!(z.frobenius_norm(), 0.0);
        let f = ComplexMatrix::column(&[C64::new(1.0, -1.0), C64::new(0.25, 2.0)]);
        let r = reconstruct(&seq, &e, &f, &tol()).unwrap();
        assert!(r.sub(&f).unwrap().frobenius_norm() < 1e-14);
    }

    #[test]
    fn e_frame_bounds_examples() {
        let basis: Vec<_> = (0..3)
            .map(|i| ComplexMatrix::from_fn(3, 1, |r, _| if r == i { ONE } else { C64::new(0.0, 0.0) }))
            .collect();
        let (lo, hi) = e_frame_bounds(&basis, &make_identity(3).unwrap(), &tol()).unwrap();
        assert!((lo - 1.0).abs() < 1e-15 && (hi - 1.0).abs() < 1e-15);

        let doubled: Vec<_> = basis.iter().map(|v| v.scale_real(2.0)).collect();
        let (lo2, hi2) = e_frame_bounds(&doubled, &make_delta(3).unwrap(), &tol()).unwrap();
        let (lo1, hi1) = e_frame_bounds(&basis, &make_delta(3).unwrap(), &tol()).unwrap();
        assert!((lo2 - 4.0 * lo1).abs() < 1e-13 && (hi2 - 4.0 * hi1).abs() < 1e-13);
        assert!(e_frame_bounds(&basis, &make_delta(2).unwrap(), &tol()).is_err());
    }

    /// Explicit triple sum `Σₙ Σₖ Σⱼ conj(E_{n,k}) E_{n,j} Λₖ* Λⱼ`.
    fn triple_sum(seq: &OperatorSequence, e: &TransformMatrix) -> ComplexMatrix {
        let d = seq.dim();
        let mut s = ComplexMatrix::zeros(d, d);
        let n_terms = seq.term_count();
        for n in 0..n_terms {
            for k in 0..n_terms {
                for j in 0..n_terms {
                    let c = e.entry(n, k).conj() * e.entry(n, j);
                    let prod = matmul(&seq.operator(k).adjoint(), seq.operator(j)).unwrap();
                    s.axpy(c, &prod).unwrap();
                }
            }
        }
        s
    }

    #[test]
    fn complex_transform_matches_triple_sum() {
        let e = make_dense(
            ComplexMatrix::from_rows(&[
                vec![C64::new(1.0, 0.5), C64::new(0.0, -1.0)],
                vec![C64::new(0.3, 0.0), C64::new(-2.0, 0.1)],
            ])
            .unwrap(),
        )
        .unwrap();
        let seq = OperatorSequence::from_operators(vec![
            ComplexMatrix::from_rows(&[vec![C64::new(1.0, 1.0), C64::new(0.0, 2.0)]]).unwrap(),
            ComplexMatrix::from_rows(&[vec![C64::new(-0.5, 0.0), C64::new(1.0, -1.0)]]).unwrap(),
        ])
        .unwrap();
        let a = frame_operator(&seq, &e).unwrap();
        let b = triple_sum(&seq, &e);
        assert!(a.sub(&b).unwrap().frobenius_norm() < 1e-14);
    }
}
