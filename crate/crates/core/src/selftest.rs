//! Reduced randomized property suite behind `egframe selftest`.
//!
//! Case `i` uses seed `base + i`, so any failure replays with `--seed <seed> --cases 1`.

use rand::Rng;

use crate::error::Result;
use crate::generators::{
    gen_functional_sequence, gen_interleaved, gen_random_frame, gen_random_operator_sequence, random_hermitian,
    random_invertible_transform, rng_from_seed, SeededRng,
};
use crate::model::OperatorSequence;
use crate::numerics::{hermitian_eig_with, C64};
use crate::theorems;
use crate::tolerance::Tolerances;
use crate::transform::{make_delta, make_identity, TransformMatrix};

/// A randomized scenario: sequence and transform.
#[derive(Debug, Clone)]
pub struct RandomScenario {
    pub sequence: OperatorSequence,
    pub transform: TransformMatrix,
}

/// `d ∈ {2, 4, 8}`, `N ∈ {d, 2d}`, `E ∈ {I, Δ, random invertible}`, functionals or operators.
pub fn random_scenario(seed: u64) -> Result<RandomScenario> {
    let mut rng = rng_from_seed(seed);
    let d = [2, 4, 8][rng.random_range(0..3)];
    let n = d * rng.random_range(1..=2);
    let transform = match rng.random_range(0..3) {
        0 => make_identity(n)?,
        1 => make_delta(n)?,
        _ => random_invertible_transform(n, rng.random())?,
    };
    let sequence = if rng.random_bool(0.5) {
        let condition = rng.random_range(1.0..10.0);
        gen_functional_sequence(&gen_random_frame(d, n, rng.random(), condition)?)?
    } else {
        let dims: Vec<usize> = (0..n).map(|_| rng.random_range(1..=d)).collect();
        gen_random_operator_sequence(d, &dims, rng.random())?
    };
    Ok(RandomScenario { sequence, transform })
}

#[derive(Debug, Clone, PartialEq)]
pub struct PropertyFailure {
    pub property: &'static str,
    pub seed: u64,
    pub message: String,
}

#[derive(Debug, Clone, Default)]
pub struct SelftestSummary {
    pub evaluated: usize,
    pub failures: Vec<PropertyFailure>,
}

impl SelftestSummary {
    pub fn passed(&self) -> bool {
        self.failures.is_empty()
    }
}

type Property = fn(u64, &Tolerances) -> Result<std::result::Result<(), String>>;

fn from_report(r: theorems::CheckReport) -> std::result::Result<(), String> {
    if r.passed {
        Ok(())
    } else {
        Err(format!("{} failed: {:?}", r.name, r.values))
    }
}

fn eigendecomposition(seed: u64, tol: &Tolerances) -> Result<std::result::Result<(), String>> {
    let mut rng: SeededRng = rng_from_seed(seed);
    let d = [1, 2, 4, 8, 16][rng.random_range(0..5)];
    let m = random_hermitian(d, rng.random_range(0.1..10.0), rng.random());
    let eig = hermitian_eig_with(&m, tol)?;
    let recon = eig.reconstruction_residual(&m) / m.frobenius_norm().max(1.0);
    let orth = eig.orthonormality_residual();
    Ok(if recon <= tol.tol_eig && orth <= tol.tol_eig {
        Ok(())
    } else {
        Err(format!("d={d}: reconstruction {recon:e}, orthonormality {orth:e}"))
    })
}

fn frame_properties(seed: u64, tol: &Tolerances) -> Result<std::result::Result<(), String>> {
    let s = random_scenario(seed)?;
    Ok(from_report(theorems::check_frame_operator_properties(
        &s.sequence,
        &s.transform,
        20,
        seed,
        tol,
    )?))
}

fn canonical_dual(seed: u64, tol: &Tolerances) -> Result<std::result::Result<(), String>> {
    let s = random_scenario(seed)?;
    Ok(from_report(theorems::check_canonical_dual(
        &s.sequence,
        &s.transform,
        20,
        seed,
        tol,
    )?))
}

fn inv_sqrt_parseval(seed: u64, tol: &Tolerances) -> Result<std::result::Result<(), String>> {
    let s = random_scenario(seed)?;
    Ok(from_report(theorems::check_inv_sqrt_parseval(
        &s.sequence,
        &s.transform,
        tol,
    )?))
}

fn scalar_perturbation(seed: u64, tol: &Tolerances) -> Result<std::result::Result<(), String>> {
    let s = random_scenario(seed)?;
    let eps = rng_from_seed(seed ^ 0x5eed).random_range(0.01..0.3);
    let gam = s.sequence.scaled(C64::new(1.0 + eps, 0.0));
    let v = theorems::check_perturbation_simple(&s.sequence, &gam, &s.transform, eps * eps, tol)?;
    Ok(if v.hypothesis_holds && v.contained {
        Ok(())
    } else {
        Err(format!(
            "eps={eps}: margin {:e}, contained {}",
            v.hypothesis_margin, v.contained
        ))
    })
}

fn delta_bessel(seed: u64, tol: &Tolerances) -> Result<std::result::Result<(), String>> {
    let s = random_scenario(seed)?;
    Ok(from_report(theorems::check_delta_bessel(&s.sequence, tol)?))
}

fn interleaved_delta(seed: u64, tol: &Tolerances) -> Result<std::result::Result<(), String>> {
    let mut rng = rng_from_seed(seed);
    let d = rng.random_range(1..=4);
    let n = d + rng.random_range(0..=4);
    let base = gen_random_frame(d, n, rng.random(), rng.random_range(1.0..5.0))?;
    let seq = gen_functional_sequence(&gen_interleaved(&base))?;
    Ok(from_report(theorems::check_interleaved_delta(&seq, tol)?))
}

pub const PROPERTIES: &[(&str, Property)] = &[
    ("eigendecomposition", eigendecomposition),
    ("frame_properties", frame_properties),
    ("canonical_dual", canonical_dual),
    ("inv_sqrt_parseval", inv_sqrt_parseval),
    ("scalar_perturbation", scalar_perturbation),
    ("delta_bessel", delta_bessel),
    ("interleaved_delta", interleaved_delta),
];

/// Runs every property on `cases` seeds starting at `base_seed`.
pub fn run_selftest(base_seed: u64, cases: usize, tol: &Tolerances) -> SelftestSummary {
    let mut summary = SelftestSummary::default();
    for i in 0..cases {
        let seed = base_seed.wrapping_add(i as u64);
        for (property, check) in PROPERTIES {
            summary.evaluated += 1;
            let message = match check(seed, tol) {
                Ok(Ok(())) => continue,
                Ok(Err(msg)) => msg,
                Err(e) => format!("error: {e}"),
            };
            summary.failures.push(PropertyFailure {
                property,
                seed,
                message,
            });
        }
    }
    summary
}
