//! Randomized invariants of the numerics, transform, frames, verifier and io layers.

mod common;

use egframe::error::Error;
use egframe::frames::{analysis, frame_operator, synthesis};
use egframe::generators::{
    gen_random_operator_sequence, random_hermitian, random_hpd, random_invertible_transform, random_vector,
    rng_from_seed,
};
use egframe::io::{emit_scenario, parse_scenario};
use egframe::model::{stacked_norm_sq, OperatorSequence, StackedVector};
use egframe::numerics::{hermitian_eig, matmul, operator_norm, solve_hpd, ComplexMatrix, C64};
use egframe::selftest::random_scenario;
use egframe::theorems::{check_closed_range, check_composition_selfadjoint, check_perturbation_simple};
use egframe::transform::apply_transform;
use egframe::Tolerances;
use proptest::prelude::*;
use rand::Rng;
use serde_json::Value;

const DIMS: [usize; 5] = [1, 2, 4, 8, 16];

fn rel_diff(a: &ComplexMatrix, b: &ComplexMatrix) -> f64 {
    a.sub(b).unwrap().frobenius_norm() / b.frobenius_norm().max(1.0)
}

#[test]
fn eigendecomposition_reconstructs_random_hermitian() {
    let tol = Tolerances::default();
    for d in DIMS {
        for i in 0..100 {
            let m = random_hermitian(d, 1.0 + i as f64 * 0.1, 1_000 * d as u64 + i);
            let eig = hermitian_eig(&m).unwrap();
            let recon = eig.reconstruction_residual(&m);
            assert!(
                recon <= tol.tol_eig * m.frobenius_norm().max(1.0),
                "d={d} i={i}: {recon:e}"
            );
            assert!(eig.orthonormality_residual() <= tol.tol_eig, "d={d} i={i}");
            assert!(
                eig.eigenvalues.windows(2).all(|w| w[0] <= w[1]),
                "d={d} i={i}: not ascending"
            );
        }
    }
}

#[test]
fn solve_hpd_residual_random_systems() {
    let tol = Tolerances::default();
    for d in DIMS {
        let mut rng = rng_from_seed(d as u64);
        for i in 0..100 {
            let m = random_hpd(d, 0.1, 10.0, 7_000 * d as u64 + i);
            let rhs = random_vector(d, &mut rng);
            let x = solve_hpd(&m, &rhs).unwrap();
            let r = matmul(&m, &x).unwrap().sub(&rhs).unwrap().frobenius_norm();
            let bound = tol.tol_solve * m.frobenius_norm() * x.frobenius_norm();
            assert!(r <= bound.max(tol.tol_solve), "d={d} i={i}: residual {r:e}");
        }
    }
}

#[test]
fn operator_norm_agrees_with_power_iteration() {
    for d in DIMS {
        let m = random_hermitian(d, 3.0, 40 + d as u64);
        let gram = matmul(&m.adjoint(), &m).unwrap();
        let power = common::power_lambda_max(&gram, 500, d as u64).sqrt();
        let norm = operator_norm(&m);
        assert!((norm - power).abs() <= 1e-6 * norm.max(1.0), "d={d}: {norm} vs {power}");
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn adjoint_is_involution(seed in any::<u64>(), rows in 1usize..9, cols in 1usize..9) {
        let mut rng = rng_from_seed(seed);
        let m = egframe::generators::random_gaussian(rows, cols, &mut rng);
        prop_assert_eq!(m.adjoint().adjoint(), m);
    }

    #[test]
    fn matmul_is_associative(seed in any::<u64>()) {
        let mut rng = rng_from_seed(seed);
        let [a, b, c] = [0, 1, 2].map(|_| egframe::generators::random_gaussian(8, 8, &mut rng));
        let left = matmul(&matmul(&a, &b).unwrap(), &c).unwrap();
        let right = matmul(&a, &matmul(&b, &c).unwrap()).unwrap();
        prop_assert!(rel_diff(&left, &right) <= 1e-12 * right.frobenius_norm().max(1.0));
    }

    #[test]
    fn transform_is_linear(seed in any::<u64>(), d in 1usize..5, n in 1usize..6) {
        let mut rng = rng_from_seed(seed);
        let dims: Vec<usize> = (0..n).map(|_| rng.random_range(1..=d)).collect();
        let lam = gen_random_operator_sequence(d, &dims, rng.random()).unwrap();
        let gam = gen_random_operator_sequence(d, &dims, rng.random()).unwrap();
        let e = random_invertible_transform(n, rng.random()).unwrap();
        let sum = lam.combine(C64::new(1.0, 0.0), &gam, C64::new(1.0, 0.0)).unwrap();
        let whole = apply_transform(&e, &sum).unwrap();
        let (ml, mg) = (apply_transform(&e, &lam).unwrap(), apply_transform(&e, &gam).unwrap());
        for ((w, x), y) in whole.operators().iter().zip(ml.operators()).zip(mg.operators()) {
            prop_assert!(w.sub(&x.add(y).unwrap()).unwrap().max_abs() <= 1e-12 * w.max_abs().max(1.0));
        }
    }

    #[test]
    fn transform_composition_is_matrix_product(seed in any::<u64>(), d in 1usize..5) {
        let n = 4;
        let mut rng = rng_from_seed(seed);
        let lam = gen_random_operator_sequence(d, &[d; 4], rng.random()).unwrap();
        let e1 = random_invertible_transform(n, rng.random()).unwrap();
        let e2 = random_invertible_transform(n, rng.random()).unwrap();
        let inner = apply_transform(&e2, &lam).unwrap();
        let staged = OperatorSequence::from_operators(inner.operators().to_vec()).unwrap();
        let twice = apply_transform(&e1, &staged).unwrap();
        let once = apply_transform(&e1.compose(&e2).unwrap(), &lam).unwrap();
        for (x, y) in twice.operators().iter().zip(once.operators()) {
            prop_assert!(x.sub(y).unwrap().max_abs() <= 1e-12 * y.max_abs().max(1.0));
        }
    }

    #[test]
    fn synthesis_is_adjoint_of_analysis(seed in any::<u64>()) {
        let s = random_scenario(seed).unwrap();
        let mut rng = rng_from_seed(seed.wrapping_add(1));
        let (p, d, n) = (s.sequence.pad_dim(), s.sequence.dim(), s.sequence.term_count());
        let f = random_vector(d, &mut rng);
        let v = StackedVector::new((0..n).map(|_| random_vector(p, &mut rng)).collect()).unwrap();
        let tf = analysis(&s.sequence, &s.transform, &f).unwrap();
        let lhs = synthesis(&s.sequence, &s.transform, &v).unwrap().inner(&f).unwrap();
        let rhs = v.inner(&tf).unwrap();
        let scale = stacked_norm_sq(&v).sqrt() * f.frobenius_norm();
        prop_assert!((lhs - rhs).norm() <= 1e-10 * scale.max(1.0));
    }

    #[test]
    fn frame_operator_scales_quadratically(seed in any::<u64>(), c in 0.1f64..5.0) {
        let s = random_scenario(seed).unwrap();
        let base = frame_operator(&s.sequence, &s.transform).unwrap();
        let scaled = frame_operator(&s.sequence.scaled(C64::new(0.0, c)), &s.transform).unwrap();
        prop_assert!(rel_diff(&scaled, &base.scale_real(c * c)) <= 1e-12 * c * c);
    }

    #[test]
    fn brute_force_triple_sum_matches(seed in any::<u64>(), d in 1usize..4, n in 1usize..4) {
        let mut rng = rng_from_seed(seed);
        let dims: Vec<usize> = (0..n).map(|_| rng.random_range(1..=d)).collect();
        let lam = gen_random_operator_sequence(d, &dims, rng.random()).unwrap();
        let e = random_invertible_transform(n, rng.random()).unwrap();
        let fast = frame_operator(&lam, &e).unwrap();
        let slow = common::triple_sum_frame_operator(&lam, &e);
        prop_assert!(common::max_abs_diff(&slow, &fast) <= 1e-12 * fast.max_abs().max(1.0));
    }

    #[test]
    fn scenario_round_trips(seed in any::<u64>(), d in 1usize..6, n in 1usize..10, alpha in 0.0f64..0.49) {
        let text = format!(
            r#"{{"schema_version": 1, "dimension": {d}, "terms": {n}, "seed": {seed},
                "generator": {{"kind": "random_frame_functionals", "condition": 3.0}},
                "transform": {{"kind": "random_invertible"}},
                "checks": [{{"name": "perturbation_simple", "gamma": {{"kind": "scaled", "factor": [1.05, 0.0]}},
                             "alpha": {alpha}}}]}}"#
        );
        let parsed = parse_scenario(&text).unwrap();
        let again = parse_scenario(&emit_scenario(&parsed)).unwrap();
        prop_assert_eq!(again, parsed);
    }

    #[test]
    fn unknown_keys_are_rejected_with_a_path(fixture in 0usize..3, pick in any::<prop::sample::Index>()) {
        let text = fixtures()[fixture];
        let mut root: Value = serde_json::from_str(text).unwrap();
        let mut objects = Vec::new();
        collect_object_paths(&root, String::new(), &mut objects);
        let target = pick.get(&objects).clone();
        let obj = if target.is_empty() { &mut root } else { root.pointer_mut(&target).unwrap() };
        obj.as_object_mut().unwrap().insert("zz_unknown".into(), Value::from(1));
        match parse_scenario(&root.to_string()) {
            Err(Error::Scenario { path, message }) => {
                prop_assert!(!path.is_empty());
                prop_assert!(message.contains("zz_unknown"), "{}", message);
            }
            other => prop_assert!(false, "object {} accepted: {:?}", target, other.map(|_| ())),
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    /// Containment wherever a hypothesis holds, over `d ∈ {2,4,8}`, `N ∈ {d,2d}` and
    /// `E ∈ {I, Δ, random}`.
    #[test]
    fn verifiers_are_sound_and_contained(seed in any::<u64>()) {
        let tol = Tolerances::default();
        let s = random_scenario(seed).unwrap();
        let mut rng = rng_from_seed(seed ^ 0xabcd);
        let (lam, e) = (&s.sequence, &s.transform);

        let noise = gen_random_operator_sequence(lam.dim(), lam.family().codomain_dims(), rng.random()).unwrap();
        let gam = lam.combine(C64::new(1.0, 0.0), &noise, C64::new(rng.random_range(0.0..0.2), 0.0)).unwrap();
        let v = check_perturbation_simple(lam, &gam, e, rng.random_range(0.0..0.49), &tol).unwrap();
        let r = v.to_report("perturbation_simple");
        prop_assert!(r.passed);
        if v.hypothesis_holds {
            prop_assert!(v.contained && r.conclusion_checked);
        } else {
            prop_assert!(!r.conclusion_checked);
        }

        let u = random_hpd(lam.dim(), 0.2, 3.0, rng.random());
        prop_assert!(check_composition_selfadjoint(lam, e, &u, &tol).unwrap().passed);
        let lam_u = lam.compose_right(&u).unwrap();
        let r = check_closed_range(&lam_u, e, &u, lam, &tol).unwrap();
        prop_assert!(r.passed, "{:?}", r);
    }
}

fn fixtures() -> [&'static str; 3] {
    [
        include_str!("../fixtures/example22.json"),
        include_str!("../fixtures/example23.json"),
        include_str!("../fixtures/perturbation.json"),
    ]
}

fn collect_object_paths(v: &Value, here: String, out: &mut Vec<String>) {
    match v {
        Value::Object(map) => {
            out.push(here.clone());
            for (k, child) in map {
                collect_object_paths(child, format!("{here}/{k}"), out);
            }
        }
        Value::Array(items) => {
            for (i, child) in items.iter().enumerate() {
                collect_object_paths(child, format!("{here}/{i}"), out);
            }
        }
        _ => {}
    }
}
