//! Oracles written independently of the library's solvers: plain-loop frame operators,
//! a Cholesky positive-semidefiniteness certificate and power iteration.

#![allow(dead_code)]

use egframe::generators::{rng_from_seed, SeededRng};
use egframe::model::OperatorSequence;
use egframe::transform::TransformMatrix;
use egframe::{ComplexMatrix, C64};
use rand::Rng;

/// `Σₙ Σₖ Σⱼ conj(E_{n,k}) E_{n,j} Λₖ* Λⱼ` by explicit loops.
pub fn triple_sum_frame_operator(seq: &OperatorSequence, e: &TransformMatrix) -> Vec<Vec<C64>> {
    let (d, n_terms, p) = (seq.dim(), seq.term_count(), seq.pad_dim());
    let mut s = vec![vec![C64::new(0.0, 0.0); d]; d];
    for n in 0..n_terms {
        for k in 0..n_terms {
            for j in 0..n_terms {
                let c = e.entry(n, k).conj() * e.entry(n, j);
                if c == C64::new(0.0, 0.0) {
                    continue;
                }
                let (lk, lj) = (seq.operator(k), seq.operator(j));
                for r in 0..d {
                    for col in 0..d {
                        let mut acc = C64::new(0.0, 0.0);
                        for i in 0..p {
                            acc += lk[(i, r)].conj() * lj[(i, col)];
                        }
                        s[r][col] += c * acc;
                    }
                }
            }
        }
    }
    s
}

pub fn max_abs_diff(a: &[Vec<C64>], b: &ComplexMatrix) -> f64 {
    let mut worst = 0.0f64;
    for (i, row) in a.iter().enumerate() {
        for (j, x) in row.iter().enumerate() {
            worst = worst.max((*x - b[(i, j)]).norm());
        }
    }
    worst
}

/// True when the Hermitian matrix `m` admits a Cholesky factorization, i.e. is positive definite.
pub fn cholesky_succeeds(m: &[Vec<C64>]) -> bool {
    let n = m.len();
    let mut l = vec![vec![C64::new(0.0, 0.0); n]; n];
    for j in 0..n {
        let mut diag = m[j][j].re;
        for k in 0..j {
            diag -= l[j][k].norm_sqr();
        }
        if !(diag > 0.0) {
            return false;
        }
        let ljj = diag.sqrt();
        l[j][j] = C64::new(ljj, 0.0);
        for i in j + 1..n {
            let mut acc = m[i][j];
            for k in 0..j {
                acc -= l[i][k] * l[j][k].conj();
            }
            l[i][j] = acc / ljj;
        }
    }
    true
}

pub fn to_rows(m: &ComplexMatrix) -> Vec<Vec<C64>> {
    (0..m.rows()).map(|i| m.row(i).to_vec()).collect()
}

/// `m + a·I` as rows.
pub fn plus_identity(m: &ComplexMatrix, a: f64) -> Vec<Vec<C64>> {
    let mut rows = to_rows(m);
    for (i, row) in rows.iter_mut().enumerate() {
        row[i] += C64::new(a, 0.0);
    }
    rows
}

/// `a·I − m` as rows.
pub fn shifted(m: &ComplexMatrix, a: f64) -> Vec<Vec<C64>> {
    let mut rows = to_rows(m);
    for (i, row) in rows.iter_mut().enumerate() {
        for x in row.iter_mut() {
            *x = -*x;
        }
        row[i] += C64::new(a, 0.0);
    }
    rows
}

/// Largest eigenvalue of a Hermitian positive semidefinite matrix by power iteration.
pub fn power_lambda_max(m: &ComplexMatrix, iterations: usize, seed: u64) -> f64 {
    let n = m.rows();
    let mut rng: SeededRng = rng_from_seed(seed);
    let mut v: Vec<C64> = (0..n)
        .map(|_| C64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0)))
        .collect();
    let mut lambda = 0.0;
    for _ in 0..iterations {
        let w: Vec<C64> = (0..n).map(|i| (0..n).map(|j| m[(i, j)] * v[j]).sum()).collect();
        let norm = w.iter().map(|x| x.norm_sqr()).sum::<f64>().sqrt();
        if norm == 0.0 {
            return 0.0;
        }
        let vv: f64 = v.iter().map(|x| x.norm_sqr()).sum();
        lambda = v.iter().zip(&w).map(|(a, b)| (a.conj() * b).re).sum::<f64>() / vv;
        v = w.into_iter().map(|x| x / norm).collect();
    }
    lambda
}
