//! Seeded generators for the concrete constructions (difference-matrix
//! examples, interleaved frames) and for randomized scenarios.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::{AmbientSpace, OperatorSequence, SubspaceFamily, WeightSequence};
use crate::numerics::{matmul, ComplexMatrix, C64, ONE, ZERO};
use crate::transform::{make_dense, TransformMatrix};

pub type SeededRng = ChaCha8Rng;

pub fn rng_from_seed(seed: u64) -> SeededRng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// SplitMix64 finalizer; derives independent child seeds from a base seed.
pub fn derive_seed(base: u64, tag: u64) -> u64 {
    let mut z = base ^ tag.wrapping_mul(0x9E37_79B9_7F4A_7C15);
    z = z.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Standard complex Gaussian entry, `E|z|² = 1`.
pub fn complex_normal(rng: &mut SeededRng) -> C64 {
    let re: f64 = rng.sample(StandardNormal);
    let im: f64 = rng.sample(StandardNormal);
    C64::new(re, im) * std::f64::consts::FRAC_1_SQRT_2
}

pub fn random_gaussian(rows: usize, cols: usize, rng: &mut SeededRng) -> ComplexMatrix {
    ComplexMatrix::from_fn(rows, cols, |_, _| complex_normal(rng))
}

/// Random nonzero vector of `ℂ^d`.
pub fn random_vector(d: usize, rng: &mut SeededRng) -> ComplexMatrix {
    loop {
        let v = random_gaussian(d, 1, rng);
        if v.frobenius_norm() > 1e-3 {
            return v;
        }
    }
}

/// Haar-like random unitary: Gram-Schmidt (applied twice) on a Gaussian matrix.
pub fn random_unitary(n: usize, rng: &mut SeededRng) -> ComplexMatrix {
    let mut q = random_gaussian(n, n, rng);
    for j in 0..n {
        for _ in 0..2 {
            for k in 0..j {
                let mut proj = ZERO;
                for i in 0..n {
                    proj += q[(i, k)].conj() * q[(i, j)];
                }
                for i in 0..n {
                    let qik = q[(i, k)];
                    q[(i, j)] -= proj * qik;
                }
            }
        }
        let norm = (0..n).map(|i| q[(i, j)].norm_sqr()).sum::<f64>().sqrt();
        for i in 0..n {
            q[(i, j)] /= norm;
        }
    }
    q
}

/// Random Hermitian matrix with operator norm exactly `norm`.
pub fn random_hermitian(d: usize, norm: f64, seed: u64) -> ComplexMatrix {
    let mut rng = rng_from_seed(seed);
    let u = random_unitary(d, &mut rng);
    let mut eigs: Vec<f64> = (0..d).map(|_| rng.random_range(-1.0..=1.0)).collect();
    // pin the largest modulus so the norm is exact
    if let Some(first) = eigs.first_mut() {
        *first = if *first < 0.0 { -1.0 } else { 1.0 };
    }
    let diag = ComplexMatrix::diag_real(&eigs.iter().map(|l| l * norm).collect::<Vec<_>>());
    hermitian_from(&u, &diag)
}

/// Random Hermitian positive definite matrix with spectrum in `[lo, hi]` (both attained when `d >= 2`).
pub fn random_hpd(d: usize, lo: f64, hi: f64, seed: u64) -> ComplexMatrix {
    let mut rng = rng_from_seed(seed);
    let u = random_unitary(d, &mut rng);
    let eigs: Vec<f64> = (0..d)
        .map(|i| match i {
            0 => lo,
            1 => hi,
            _ => rng.random_range(lo..=hi),
        })
        .collect();
    hermitian_from(&u, &ComplexMatrix::diag_real(&eigs))
}

fn hermitian_from(u: &ComplexMatrix, diag: &ComplexMatrix) -> ComplexMatrix {
    let m = matmul(&matmul(u, diag).expect("square"), &u.adjoint()).expect("square");
    ComplexMatrix::from_fn(m.rows(), m.cols(), |i, j| (m[(i, j)] + m[(j, i)].conj()) * 0.5)
}

/// Dense transform `U·diag(s)·V` with singular values in `[1/2, 2]`.
pub fn random_invertible_transform(n: usize, seed: u64) -> Result<TransformMatrix> {
    let mut rng = rng_from_seed(seed);
    let u = random_unitary(n, &mut rng);
    let v = random_unitary(n, &mut rng);
    let s: Vec<f64> = (0..n).map(|_| rng.random_range(0.5..=2.0)).collect();
    make_dense(matmul(&matmul(&u, &ComplexMatrix::diag_real(&s))?, &v)?)
}

/// `Λₙ = vectorₙ*`, so that `Λₙ f = ⟨f, vectorₙ⟩`; `p = 1`.
pub fn gen_functional_sequence(vectors: &[ComplexMatrix]) -> Result<OperatorSequence> {
    let d = vectors
        .first()
        .ok_or_else(|| Error::Domain("need at least one vector".into()))?
        .rows();
    let ops = vectors
        .iter()
        .enumerate()
        .map(|(n, v)| {
            if v.shape() != (d, 1) {
                return Err(Error::shape(
                    "gen_functional_sequence",
                    format!("({d}, 1) for vector {}", n + 1),
                    format!("{:?}", v.shape()),
                ));
            }
            Ok(v.adjoint())
        })
        .collect::<Result<Vec<_>>>()?;
    OperatorSequence::from_operators(ops)
}

/// `e₁ … e_N` in `ℂ^d`; terms past `d` are zero vectors.
pub fn standard_basis(d: usize, n_terms: usize) -> Vec<ComplexMatrix> {
    (0..n_terms)
        .map(|k| ComplexMatrix::from_fn(d, 1, |i, _| if i == k { ONE } else { ZERO }))
        .collect()
}

/// `N` vectors of `ℂ^d` whose frame operator has spectrum geometrically spread over
/// `[1, condition_target]`.
pub fn gen_random_frame(d: usize, n_terms: usize, seed: u64, condition_target: f64) -> Result<Vec<ComplexMatrix>> {
    if d == 0 || n_terms < d {
        return Err(Error::Domain(format!(
            "random frame needs N >= d >= 1 (got d={d}, N={n_terms})"
        )));
    }
    if !(condition_target >= 1.0) || !condition_target.is_finite() {
        return Err(Error::Domain(format!(
            "condition target must be a finite number >= 1 (got {condition_target})"
        )));
    }
    let mut rng = rng_from_seed(seed);
    let u = random_unitary(d, &mut rng);
    let w = random_unitary(n_terms, &mut rng);
    let sigma: Vec<f64> = (0..d)
        .map(|i| {
            let t = if d == 1 { 0.0 } else { i as f64 / (d - 1) as f64 };
            condition_target.powf(t).sqrt()
        })
        .collect();
    // F = U · diag(σ) · W[0..d, :], so F F* = U diag(σ²) U*.
    let top = w.block(0, 0, d, n_terms);
    let f = matmul(&matmul(&u, &ComplexMatrix::diag_real(&sigma))?, &top)?;
    Ok((0..n_terms).map(|k| f.col(k)).collect())
}

/// `(f₁, 0, f₂, 0, …)`
pub fn gen_interleaved(vectors: &[ComplexMatrix]) -> Vec<ComplexMatrix> {
    vectors
        .iter()
        .flat_map(|v| [v.clone(), ComplexMatrix::zeros(v.rows(), v.cols())])
        .collect()
}

/// Weights with moduli uniform in `[lo, hi]` and uniformly random phases.
pub fn gen_weights(n_terms: usize, lo: f64, hi: f64, seed: u64) -> Result<WeightSequence> {
    if !(lo > 0.0) || !(lo <= hi) || !hi.is_finite() {
        return Err(Error::Domain(format!(
            "weights need 0 < lo <= hi < inf (got lo={lo}, hi={hi})"
        )));
    }
    if lo == hi {
        return WeightSequence::constant(n_terms, C64::new(lo, 0.0));
    }
    let mut rng = rng_from_seed(seed);
    let values = (0..n_terms)
        .map(|_| {
            let r = rng.random_range(lo..=hi);
            let phase = rng.random_range(0.0..std::f64::consts::TAU);
            C64::from_polar(r, phase)
        })
        .collect();
    WeightSequence::new(values)
}

/// Gaussian operators `ℂ^d → ℂ^{dₙ}`, padded to `max dₙ`.
pub fn gen_random_operator_sequence(d: usize, codomain_dims: &[usize], seed: u64) -> Result<OperatorSequence> {
    let family = SubspaceFamily::new(codomain_dims.to_vec())?;
    let space = AmbientSpace::new(d)?;
    let mut rng = rng_from_seed(seed);
    let p = family.pad_dim();
    let ops = codomain_dims
        .iter()
        .map(|&dn| ComplexMatrix::from_fn(p, d, |i, _| if i < dn { complex_normal(&mut rng) } else { ZERO }))
        .collect();
    OperatorSequence::new(space, family, ops)
}

/// Declarative description of an operator sequence.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum GeneratorSpec {
    /// `Λₙ = eₙ*` (zero functional for `n > d`).
    StandardBasisFunctionals {},
    /// Functionals of a random frame with the given frame-operator condition number.
    RandomFrameFunctionals {
        #[serde(default = "one")]
        condition: f64,
    },
    /// `(f₁, 0, f₂, 0, …)` from a random frame of `N/2` vectors.
    InterleavedZeros {
        #[serde(default = "one")]
        condition: f64,
    },
    /// Gaussian operators; `codomain_dims` defaults to all ones.
    RandomOperatorSequence {
        #[serde(default, skip_serializing_if = "Option::is_none")]
        codomain_dims: Option<Vec<usize>>,
    },
    /// Operators given entry by entry (`N` matrices of `p × d`).
    Explicit {
        #[serde(default, skip_serializing_if = "Option::is_none")]
        codomain_dims: Option<Vec<usize>>,
        operators: Vec<Vec<Vec<C64>>>,
    },
}

fn one() -> f64 {
    1.0
}

impl GeneratorSpec {
    pub fn build(&self, d: usize, n_terms: usize, seed: u64) -> Result<OperatorSequence> {
        match self {
            Self::StandardBasisFunctionals {} => gen_functional_sequence(&standard_basis(d, n_terms)),
            Self::RandomFrameFunctionals { condition } => {
                gen_functional_sequence(&gen_random_frame(d, n_terms, seed, *condition)?)
            }
            Self::InterleavedZeros { condition } => {
                if !n_terms.is_multiple_of(2) {
                    return Err(Error::Domain(format!(
                        "interleaved sequence needs an even number of terms (got {n_terms})"
                    )));
                }
                let base = gen_random_frame(d, n_terms / 2, seed, *condition)?;
                gen_functional_sequence(&gen_interleaved(&base))
            }
            Self::RandomOperatorSequence { codomain_dims } => {
                let dims = codomain_dims.clone().unwrap_or_else(|| vec![1; n_terms]);
                if dims.len() != n_terms {
                    return Err(Error::shape("random_operator_sequence", n_terms, dims.len()));
                }
                gen_random_operator_sequence(d, &dims, seed)
            }
            Self::Explicit {
                codomain_dims,
                operators,
            } => {
                if operators.len() != n_terms {
                    return Err(Error::shape(
                        "explicit generator",
                        format!("{n_terms} operators"),
                        operators.len(),
                    ));
                }
                let ops = operators
                    .iter()
                    .map(|rows| ComplexMatrix::from_rows(rows))
                    .collect::<Result<Vec<_>>>()?;
                let p = ops.first().map_or(0, ComplexMatrix::rows);
                let dims = codomain_dims.clone().unwrap_or_else(|| vec![p; n_terms]);
                OperatorSequence::new(AmbientSpace::new(d)?, SubspaceFamily::new(dims)?, ops)
            }
        }
    }
}
