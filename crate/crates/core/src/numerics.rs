//! Dense complex matrix kernels.
//!
//! Everything in the crate (operators, vectors, the transform `E`) is carried
//! by [`ComplexMatrix`]. The Hermitian eigensolver is a cyclic complex Jacobi
//! iteration.

use std::fmt;
use std::ops::{Index, IndexMut};

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::tolerance::Tolerances;

pub type C64 = Complex64;

pub const ZERO: C64 = C64::new(0.0, 0.0);
pub const ONE: C64 = C64::new(1.0, 0.0);

/// Dense row-major complex matrix with finite entries.
#[derive(Clone, PartialEq)]
pub struct ComplexMatrix {
    rows: usize,
    cols: usize,
    data: Vec<C64>,
}

impl fmt::Debug for ComplexMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "ComplexMatrix {}x{} [", self.rows, self.cols)?;
        for i in 0..self.rows {
            write!(f, "  ")?;
            for j in 0..self.cols {
                let z = self[(i, j)];
                write!(f, "{:>10.4}{:+.4}i ", z.re, z.im)?;
            }
            writeln!(f)?;
        }
        write!(f, "]")
    }
}

impl ComplexMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self {
            rows,
            cols,
            data: vec![ZERO; rows * cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m[(i, i)] = ONE;
        }
        m
    }

    pub fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> C64) -> Self {
        let mut data = Vec::with_capacity(rows * cols);
        for i in 0..rows {
            for j in 0..cols {
                data.push(f(i, j));
            }
        }
        Self { rows, cols, data }
    }

    /// Builds a matrix from row-major entries, rejecting wrong counts and non-finite values.
    pub fn from_vec(rows: usize, cols: usize, data: Vec<C64>) -> Result<Self> {
        if data.len() != rows * cols {
            return Err(Error::shape(
                "from_vec",
                format!("{} entries", rows * cols),
                format!("{} entries", data.len()),
            ));
        }
        if let Some(pos) = data.iter().position(|z| !z.re.is_finite() || !z.im.is_finite()) {
            return Err(Error::Domain(format!(
                "non-finite entry at ({}, {})",
                pos / cols.max(1),
                pos % cols.max(1)
            )));
        }
        Ok(Self { rows, cols, data })
    }

    /// Builds a matrix from nested rows of complex numbers.
    pub fn from_rows(rows: &[Vec<C64>]) -> Result<Self> {
        let r = rows.len();
        let c = rows.first().map_or(0, Vec::len);
        if let Some(bad) = rows.iter().position(|row| row.len() != c) {
            return Err(Error::shape(
                "from_rows",
                format!("{c} columns"),
                format!("{} columns in row {bad}", rows[bad].len()),
            ));
        }
        Self::from_vec(r, c, rows.iter().flatten().copied().collect())
    }

    pub fn from_real_rows(rows: &[&[f64]]) -> Result<Self> {
        let rows: Vec<Vec<C64>> = rows
            .iter()
            .map(|r| r.iter().map(|&x| C64::new(x, 0.0)).collect())
            .collect();
        Self::from_rows(&rows)
    }

    pub fn column(values: &[C64]) -> Self {
        Self {
            rows: values.len(),
            cols: 1,
            data: values.to_vec(),
        }
    }

    pub fn real_column(values: &[f64]) -> Self {
        Self::column(&values.iter().map(|&x| C64::new(x, 0.0)).collect::<Vec<_>>())
    }

    pub fn diag_real(values: &[f64]) -> Self {
        let mut m = Self::zeros(values.len(), values.len());
        for (i, &v) in values.iter().enumerate() {
            m[(i, i)] = C64::new(v, 0.0);
        }
        m
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn shape(&self) -> (usize, usize) {
        (self.rows, self.cols)
    }

    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    pub fn as_slice(&self) -> &[C64] {
        &self.data
    }

    pub fn row(&self, i: usize) -> &[C64] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn col(&self, j: usize) -> ComplexMatrix {
        Self::from_fn(self.rows, 1, |i, _| self[(i, j)])
    }

    pub fn is_finite(&self) -> bool {
        self.data.iter().all(|z| z.re.is_finite() && z.im.is_finite())
    }

    pub fn adjoint(&self) -> ComplexMatrix {
        adjoint(self)
    }

    pub fn scale(&self, c: C64) -> ComplexMatrix {
        Self {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().map(|z| z * c).collect(),
        }
    }

    pub fn scale_real(&self, c: f64) -> ComplexMatrix {
        self.scale(C64::new(c, 0.0))
    }

    pub fn add(&self, other: &ComplexMatrix) -> Result<ComplexMatrix> {
        self.zip_with(other, "add", |a, b| a + b)
    }

    pub fn sub(&self, other: &ComplexMatrix) -> Result<ComplexMatrix> {
        self.zip_with(other, "sub", |a, b| a - b)
    }

    /// `self += c * other`
    pub fn axpy(&mut self, c: C64, other: &ComplexMatrix) -> Result<()> {
        if self.shape() != other.shape() {
            return Err(Error::shape(
                "axpy",
                format!("{:?}", self.shape()),
                format!("{:?}", other.shape()),
            ));
        }
        for (a, b) in self.data.iter_mut().zip(&other.data) {
            *a += c * b;
        }
        Ok(())
    }

    fn zip_with(&self, other: &ComplexMatrix, op: &'static str, f: impl Fn(C64, C64) -> C64) -> Result<ComplexMatrix> {
        if self.shape() != other.shape() {
            return Err(Error::shape(
                op,
                format!("{:?}", self.shape()),
                format!("{:?}", other.shape()),
            ));
        }
        Ok(Self {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().zip(&other.data).map(|(&a, &b)| f(a, b)).collect(),
        })
    }

    pub fn frobenius_norm(&self) -> f64 {
        self.norm_sq().sqrt()
    }

    /// Sum of squared moduli of all entries.
    pub fn norm_sq(&self) -> f64 {
        self.data.iter().map(|z| z.norm_sqr()).sum()
    }

    pub fn max_abs(&self) -> f64 {
        self.data.iter().map(|z| z.norm()).fold(0.0, f64::max)
    }

    /// `⟨self, other⟩ = Σ self_ij · conj(other_ij)`, linear in the first argument.
    pub fn inner(&self, other: &ComplexMatrix) -> Result<C64> {
        if self.shape() != other.shape() {
            return Err(Error::shape(
                "inner",
                format!("{:?}", self.shape()),
                format!("{:?}", other.shape()),
            ));
        }
        Ok(self.data.iter().zip(&other.data).map(|(a, b)| a * b.conj()).sum())
    }

    /// `‖M − M*‖_F`
    pub fn hermiticity_residual(&self) -> f64 {
        if !self.is_square() {
            return f64::INFINITY;
        }
        let n = self.rows;
        let mut acc = 0.0;
        for i in 0..n {
            for j in 0..n {
                acc += (self[(i, j)] - self[(j, i)].conj()).norm_sqr();
            }
        }
        acc.sqrt()
    }

    /// Vertical concatenation of blocks with equal column counts.
    pub fn vstack(blocks: &[ComplexMatrix]) -> Result<ComplexMatrix> {
        let cols = blocks.first().map_or(0, |b| b.cols);
        let mut data = Vec::new();
        let mut rows = 0;
        for b in blocks {
            if b.cols != cols {
                return Err(Error::shape("vstack", format!("{cols} columns"), b.cols));
            }
            rows += b.rows;
            data.extend_from_slice(&b.data);
        }
        Ok(Self { rows, cols, data })
    }

    /// Copy of the sub-block starting at `(r0, c0)`.
    pub fn block(&self, r0: usize, c0: usize, rows: usize, cols: usize) -> ComplexMatrix {
        Self::from_fn(rows, cols, |i, j| self[(r0 + i, c0 + j)])
    }
}

impl Index<(usize, usize)> for ComplexMatrix {
    type Output = C64;

    fn index(&self, (i, j): (usize, usize)) -> &C64 {
        debug_assert!(i < self.rows && j < self.cols);
        &self.data[i * self.cols + j]
    }
}

impl IndexMut<(usize, usize)> for ComplexMatrix {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut C64 {
        debug_assert!(i < self.rows && j < self.cols);
        &mut self.data[i * self.cols + j]
    }
}

/// Definitional product; every entry accumulates over `k` in ascending order.
pub fn matmul(a: &ComplexMatrix, b: &ComplexMatrix) -> Result<ComplexMatrix> {
    if a.cols != b.rows {
        return Err(Error::shape(
            "matmul",
            format!("rhs with {} rows", a.cols),
            format!("{:?}", b.shape()),
        ));
    }
    let mut out = ComplexMatrix::zeros(a.rows, b.cols);
    for i in 0..a.rows {
        let out_row = &mut out.data[i * b.cols..(i + 1) * b.cols];
        for k in 0..a.cols {
            let aik = a.data[i * a.cols + k];
            if aik == ZERO {
                continue;
            }
            let b_row = &b.data[k * b.cols..(k + 1) * b.cols];
            for (o, bkj) in out_row.iter_mut().zip(b_row) {
                *o += aik * bkj;
            }
        }
    }
    Ok(out)
}

/// Conjugate transpose.
pub fn adjoint(a: &ComplexMatrix) -> ComplexMatrix {
    ComplexMatrix::from_fn(a.cols, a.rows, |i, j| a[(j, i)].conj())
}

/// `a* · b` without materializing the adjoint.
pub fn adjoint_mul(a: &ComplexMatrix, b: &ComplexMatrix) -> Result<ComplexMatrix> {
    if a.rows != b.rows {
        return Err(Error::shape(
            "adjoint_mul",
            format!("rhs with {} rows", a.rows),
            format!("{:?}", b.shape()),
        ));
    }
    let mut out = ComplexMatrix::zeros(a.cols, b.cols);
    for k in 0..a.rows {
        for i in 0..a.cols {
            let aki = a[(k, i)].conj();
            if aki == ZERO {
                continue;
            }
            for j in 0..b.cols {
                out.data[i * b.cols + j] += aki * b.data[k * b.cols + j];
            }
        }
    }
    Ok(out)
}

/// Integer power of a square matrix (`m^0 = I`).
pub fn matpow(m: &ComplexMatrix, power: u32) -> Result<ComplexMatrix> {
    if !m.is_square() {
        return Err(Error::shape("matpow", "square matrix", format!("{:?}", m.shape())));
    }
    let mut out = ComplexMatrix::identity(m.rows);
    for _ in 0..power {
        out = matmul(&out, m)?;
    }
    Ok(out)
}

#[derive(Debug, Clone)]
pub struct HermitianEigenResult {
    /// Ascending.
    pub eigenvalues: Vec<f64>,
    /// Unitary; column `j` pairs with `eigenvalues[j]`.
    pub eigenvectors: ComplexMatrix,
}

impl HermitianEigenResult {
    pub fn min(&self) -> f64 {
        self.eigenvalues.first().copied().unwrap_or(f64::NAN)
    }

    pub fn max(&self) -> f64 {
        self.eigenvalues.last().copied().unwrap_or(f64::NAN)
    }

    /// `V · diag(g(λ)) · V*`
    pub fn map_spectrum(&self, g: impl Fn(f64) -> f64) -> ComplexMatrix {
        let v = &self.eigenvectors;
        let n = v.rows();
        let weights: Vec<f64> = self.eigenvalues.iter().map(|&l| g(l)).collect();
        ComplexMatrix::from_fn(n, n, |i, j| {
            let mut acc = ZERO;
            for (k, w) in weights.iter().enumerate() {
                acc += v[(i, k)] * v[(j, k)].conj() * *w;
            }
            acc
        })
    }

    /// `‖V·diag(λ)·V* − m‖_F`
    pub fn reconstruction_residual(&self, m: &ComplexMatrix) -> f64 {
        match self.map_spectrum(|l| l).sub(m) {
            Ok(r) => r.frobenius_norm(),
            Err(_) => f64::INFINITY,
        }
    }

    /// `‖V*V − I‖_F`
    pub fn orthonormality_residual(&self) -> f64 {
        let v = &self.eigenvectors;
        adjoint_mul(v, v)
            .and_then(|g| g.sub(&ComplexMatrix::identity(v.cols())))
            .map_or(f64::INFINITY, |r| r.frobenius_norm())
    }
}

const MAX_SWEEPS: usize = 100;

pub fn hermitian_eig(m: &ComplexMatrix) -> Result<HermitianEigenResult> {
    hermitian_eig_with(m, &Tolerances::default())
}

/// Eigendecomposition of a Hermitian matrix by cyclic complex Jacobi rotations.
///
/// The input is symmetrized as `(m + m*)/2` after the Hermiticity check.
pub fn hermitian_eig_with(m: &ComplexMatrix, tol: &Tolerances) -> Result<HermitianEigenResult> {
    if !m.is_square() {
        return Err(Error::shape(
            "hermitian_eig",
            "square matrix",
            format!("{:?}", m.shape()),
        ));
    }
    let asym = m.hermiticity_residual();
    if asym > tol.tol_herm * m.frobenius_norm().max(1.0) {
        return Err(Error::Domain(format!("matrix is not Hermitian: ‖M − M*‖_F = {asym:e}")));
    }
    let n = m.rows;
    let mut a = ComplexMatrix::from_fn(n, n, |i, j| (m[(i, j)] + m[(j, i)].conj()) * 0.5);
    for i in 0..n {
        a[(i, i)] = C64::new(a[(i, i)].re, 0.0);
    }
    let mut v = ComplexMatrix::identity(n);

    for _ in 0..MAX_SWEEPS {
        let mut rotated = false;
        for p in 0..n {
            for q in (p + 1)..n {
                let apq = a[(p, q)];
                let abs = apq.norm();
                if abs == 0.0 {
                    continue;
                }
                let app = a[(p, p)].re;
                let aqq = a[(q, q)].re;
                // Negligible against both diagonal entries: rotation would not change them.
                if abs <= 0.5 * f64::EPSILON * (app.abs().min(aqq.abs()))
                    || (app.abs() + abs == app.abs() && aqq.abs() + abs == aqq.abs())
                {
                    a[(p, q)] = ZERO;
                    a[(q, p)] = ZERO;
                    continue;
                }
                rotated = true;
                let theta = (aqq - app) / (2.0 * abs);
                let t = if theta == 0.0 {
                    1.0
                } else {
                    theta.signum() / (theta.abs() + (theta * theta + 1.0).sqrt())
                };
                let c = 1.0 / (t * t + 1.0).sqrt();
                let s = t * c;
                let phase_conj = (apq / abs).conj();
                // G = diag(1, e^{-iφ}) · [[c, s], [-s, c]] acting on (p, q)
                let g_pp = C64::new(c, 0.0);
                let g_pq = C64::new(s, 0.0);
                let g_qp = phase_conj * (-s);
                let g_qq = phase_conj * c;

                for k in 0..n {
                    let akp = a[(k, p)];
                    let akq = a[(k, q)];
                    a[(k, p)] = akp * g_pp + akq * g_qp;
                    a[(k, q)] = akp * g_pq + akq * g_qq;
                }
                for k in 0..n {
                    let apk = a[(p, k)];
                    let aqk = a[(q, k)];
                    a[(p, k)] = g_pp.conj() * apk + g_qp.conj() * aqk;
                    a[(q, k)] = g_pq.conj() * apk + g_qq.conj() * aqk;
                }
                a[(p, q)] = ZERO;
                a[(q, p)] = ZERO;
                a[(p, p)] = C64::new(app - t * abs, 0.0);
                a[(q, q)] = C64::new(aqq + t * abs, 0.0);

                for k in 0..n {
                    let vkp = v[(k, p)];
                    let vkq = v[(k, q)];
                    v[(k, p)] = vkp * g_pp + vkq * g_qp;
                    v[(k, q)] = vkp * g_pq + vkq * g_qq;
                }
            }
        }
        if !rotated {
            break;
        }
    }

    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| a[(i, i)].re.total_cmp(&a[(j, j)].re));
    let eigenvalues = order.iter().map(|&i| a[(i, i)].re).collect();
    let eigenvectors = ComplexMatrix::from_fn(n, n, |i, j| v[(i, order[j])]);
    Ok(HermitianEigenResult {
        eigenvalues,
        eigenvectors,
    })
}

fn check_hpd(m: &ComplexMatrix, tol: &Tolerances) -> Result<HermitianEigenResult> {
    let eig = hermitian_eig_with(m, tol)?;
    let (lo, hi) = (eig.min(), eig.max());
    if !(hi > 0.0) || !(lo > tol.tol_pd * hi) {
        return Err(Error::Singular { min_eigenvalue: lo });
    }
    Ok(eig)
}

/// Lower Cholesky factor of an HPD matrix.
fn cholesky(m: &ComplexMatrix) -> Result<ComplexMatrix> {
    let n = m.rows;
    let mut l = ComplexMatrix::zeros(n, n);
    for j in 0..n {
        let mut d = m[(j, j)].re;
        for k in 0..j {
            d -= l[(j, k)].norm_sqr();
        }
        if !(d > 0.0) {
            return Err(Error::Singular { min_eigenvalue: d });
        }
        let ljj = d.sqrt();
        l[(j, j)] = C64::new(ljj, 0.0);
        for i in (j + 1)..n {
            let mut acc = m[(i, j)];
            for k in 0..j {
                acc -= l[(i, k)] * l[(j, k)].conj();
            }
            l[(i, j)] = acc / ljj;
        }
    }
    Ok(l)
}

fn cholesky_solve(l: &ComplexMatrix, rhs: &ComplexMatrix) -> ComplexMatrix {
    let n = l.rows;
    let mut x = rhs.clone();
    for c in 0..rhs.cols {
        for i in 0..n {
            let mut acc = x[(i, c)];
            for k in 0..i {
                acc -= l[(i, k)] * x[(k, c)];
            }
            x[(i, c)] = acc / l[(i, i)];
        }
        for i in (0..n).rev() {
            let mut acc = x[(i, c)];
            for k in (i + 1)..n {
                acc -= l[(k, i)].conj() * x[(k, c)];
            }
            x[(i, c)] = acc / l[(i, i)];
        }
    }
    x
}

pub fn solve_hpd(m: &ComplexMatrix, rhs: &ComplexMatrix) -> Result<ComplexMatrix> {
    solve_hpd_with(m, rhs, &Tolerances::default())
}

/// Solves `m·x = rhs` for Hermitian positive definite `m` (Cholesky plus one refinement step).
pub fn solve_hpd_with(m: &ComplexMatrix, rhs: &ComplexMatrix, tol: &Tolerances) -> Result<ComplexMatrix> {
    if !m.is_square() {
        return Err(Error::shape("solve_hpd", "square matrix", format!("{:?}", m.shape())));
    }
    if rhs.rows != m.rows {
        return Err(Error::shape(
            "solve_hpd",
            format!("rhs with {} rows", m.rows),
            format!("{:?}", rhs.shape()),
        ));
    }
    check_hpd(m, tol)?;
    let sym = ComplexMatrix::from_fn(m.rows, m.cols, |i, j| (m[(i, j)] + m[(j, i)].conj()) * 0.5);
    let l = cholesky(&sym)?;
    let mut x = cholesky_solve(&l, rhs);
    let r = rhs.sub(&matmul(&sym, &x)?)?;
    let dx = cholesky_solve(&l, &r);
    x.axpy(ONE, &dx)?;
    Ok(x)
}

pub fn inv_sqrt_hpd(m: &ComplexMatrix) -> Result<ComplexMatrix> {
    inv_sqrt_hpd_with(m, &Tolerances::default())
}

/// `m^{-1/2}` through the eigendecomposition, `λ ↦ λ^{-1/2}`.
pub fn inv_sqrt_hpd_with(m: &ComplexMatrix, tol: &Tolerances) -> Result<ComplexMatrix> {
    if !m.is_square() {
        return Err(Error::shape(
            "inv_sqrt_hpd",
            "square matrix",
            format!("{:?}", m.shape()),
        ));
    }
    let eig = check_hpd(m, tol)?;
    let r = eig.map_spectrum(|l| 1.0 / l.sqrt());
    Ok(ComplexMatrix::from_fn(r.rows, r.cols, |i, j| {
        (r[(i, j)] + r[(j, i)].conj()) * 0.5
    }))
}

/// Largest singular value.
pub fn operator_norm(m: &ComplexMatrix) -> f64 {
    extreme_singular_values(m).1
}

/// Smallest singular value (of the `cols`-dimensional domain; zero for wide matrices).
pub fn min_singular_value(m: &ComplexMatrix) -> f64 {
    extreme_singular_values(m).0
}

fn extreme_singular_values(m: &ComplexMatrix) -> (f64, f64) {
    if m.rows == 0 || m.cols == 0 {
        return (0.0, 0.0);
    }
    let gram = adjoint_mul(m, m).expect("m*·m is always conformable");
    // m*m is Hermitian by construction, so the only failure mode is non-finite input.
    match hermitian_eig(&gram) {
        Ok(eig) => (eig.min().max(0.0).sqrt(), eig.max().max(0.0).sqrt()),
        Err(_) => (f64::NAN, f64::NAN),
    }
}

/// Orthonormal basis (as columns) of the range of `m`; rank decided relative to the largest
/// squared singular value.
pub fn range_basis(m: &ComplexMatrix, rank_rel: f64) -> ComplexMatrix {
    let gram = matmul(m, &m.adjoint()).expect("m·m* is always conformable");
    let eig = match hermitian_eig(&gram) {
        Ok(e) => e,
        Err(_) => return ComplexMatrix::zeros(m.rows, 0),
    };
    let top = eig.max();
    if !(top > 0.0) {
        return ComplexMatrix::zeros(m.rows, 0);
    }
    let keep: Vec<usize> = (0..eig.eigenvalues.len())
        .filter(|&j| eig.eigenvalues[j] > rank_rel * top)
        .collect();
    ComplexMatrix::from_fn(m.rows, keep.len(), |i, j| eig.eigenvectors[(i, keep[j])])
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> C64 {
        C64::new(re, im)
    }

    fn real(rows: &[&[f64]]) -> ComplexMatrix {
        ComplexMatrix::from_real_rows(rows).unwrap()
    }

    fn close(a: &ComplexMatrix, b: &ComplexMatrix, tol: f64) -> bool {
        a.sub(b).unwrap().frobenius_norm() <= tol
    }

    #[test]
    fn matmul_examples() {
        let m = real(&[&[1.0, 2.0], &[3.0, 4.0]]);
        assert_eq!(matmul(&ComplexMatrix::identity(2), &m).unwrap(), m);

        let p = real(&[&[0.0, 1.0], &[1.0, 0.0]]);
        let v = ComplexMatrix::column(&[c(1.5, 2.0), c(-3.0, 0.5)]);
        let pv = matmul(&p, &v).unwrap();
        assert_eq!(pv, ComplexMatrix::column(&[c(-3.0, 0.5), c(1.5, 2.0)]));

        let u = real(&[&[1.0, -1.0], &[0.0, 1.0]]);
        let ones = ComplexMatrix::real_column(&[1.0, 1.0]);
        assert_eq!(matmul(&u, &ones).unwrap(), ComplexMatrix::real_column(&[0.0, 1.0]));
    }

    #[test]
    fn matmul_shape_error() {
        let a = ComplexMatrix::zeros(2, 3);
        let b = ComplexMatrix::zeros(2, 3);
        assert!(matches!(matmul(&a, &b), Err(Error::Shape { .. })));
    }

    #[test]
    fn adjoint_examples() {
        let i = ComplexMatrix::from_rows(&[vec![c(0.0, 1.0)]]).unwrap();
        assert_eq!(adjoint(&i)[(0, 0)], c(0.0, -1.0));

        let sym = real(&[&[1.0, 2.0], &[2.0, 5.0]]);
        assert_eq!(adjoint(&sym), sym);

        let m = real(&[&[1.0, 2.0], &[3.0, 4.0]]);
        assert_eq!(adjoint(&m), real(&[&[1.0, 3.0], &[2.0, 4.0]]));
    }

    #[test]
    fn eig_examples() {
        let e = hermitian_eig(&ComplexMatrix::identity(3)).unwrap();
        assert_eq!(e.eigenvalues, vec![1.0, 1.0, 1.0]);

        // λ² − 3λ + 1 = 0
        let m = real(&[&[2.0, -1.0], &[-1.0, 1.0]]);
        let e = hermitian_eig(&m).unwrap();
        let s5 = 5f64.sqrt();
        assert!((e.eigenvalues[0] - (3.0 - s5) / 2.0).abs() < 1e-14);
        assert!((e.eigenvalues[1] - (3.0 + s5) / 2.0).abs() < 1e-14);
        assert!(e.reconstruction_residual(&m) < 1e-14);

        let e = hermitian_eig(&real(&[&[4.0]])).unwrap();
        assert_eq!(e.eigenvalues, vec![4.0]);
    }

    #[test]
    fn eig_complex_hermitian() {
        // [[2, i], [-i, 2]] has eigenvalues 1 and 3.
        let m = ComplexMatrix::from_rows(&[vec![c(2.0, 0.0), c(0.0, 1.0)], vec![c(0.0, -1.0), c(2.0, 0.0)]]).unwrap();
        let e = hermitian_eig(&m).unwrap();
        assert!((e.eigenvalues[0] - 1.0).abs() < 1e-14);
        assert!((e.eigenvalues[1] - 3.0).abs() < 1e-14);
        assert!(e.reconstruction_residual(&m) < 1e-14);
        assert!(e.orthonormality_residual() < 1e-14);
    }

    #[test]
    fn eig_rejects_bad_input() {
        assert!(matches!(
            hermitian_eig(&ComplexMatrix::zeros(2, 3)),
            Err(Error::Shape { .. })
        ));
        let m = real(&[&[1.0, 2.0], &[0.0, 1.0]]);
        assert!(matches!(hermitian_eig(&m), Err(Error::Domain(_))));
    }

    #[test]
    fn solve_examples() {
        let b = ComplexMatrix::column(&[c(1.0, -2.0), c(0.5, 0.0)]);
        assert!(close(&solve_hpd(&ComplexMatrix::identity(2), &b).unwrap(), &b, 1e-15));

        let d = ComplexMatrix::diag_real(&[2.0, 4.0]);
        let x = solve_hpd(&d, &ComplexMatrix::real_column(&[2.0, 4.0])).unwrap();
        assert!(close(&x, &ComplexMatrix::real_column(&[1.0, 1.0]), 1e-15));

        // inverse of [[2,-1],[-1,1]] is [[1,1],[1,2]] (det 1)
        let m = real(&[&[2.0, -1.0], &[-1.0, 1.0]]);
        let x = solve_hpd(&m, &ComplexMatrix::real_column(&[1.0, 0.0])).unwrap();
        assert!(close(&x, &ComplexMatrix::real_column(&[1.0, 1.0]), 1e-14));
    }

    #[test]
    fn solve_rejects_singular() {
        let m = ComplexMatrix::diag_real(&[1.0, 0.0]);
        match solve_hpd(&m, &ComplexMatrix::real_column(&[1.0, 1.0])) {
            Err(Error::Singular { min_eigenvalue }) => assert_eq!(min_eigenvalue, 0.0),
            other => panic!("expected singular error, got {other:?}"),
        }
        let m = ComplexMatrix::diag_real(&[1.0, -2.0]);
        assert!(matches!(
            solve_hpd(&m, &ComplexMatrix::real_column(&[1.0, 1.0])),
            Err(Error::Singular { .. })
        ));
    }

    #[test]
    fn inv_sqrt_examples() {
        let r = inv_sqrt_hpd(&ComplexMatrix::identity(3)).unwrap();
        assert!(close(&r, &ComplexMatrix::identity(3), 1e-15));

        let r = inv_sqrt_hpd(&ComplexMatrix::diag_real(&[4.0, 9.0])).unwrap();
        assert!(close(&r, &ComplexMatrix::diag_real(&[0.5, 1.0 / 3.0]), 1e-15));
    }

    #[test]
    fn operator_norm_examples() {
        assert!((operator_norm(&ComplexMatrix::identity(5)) - 1.0).abs() < 1e-15);
        assert!((operator_norm(&ComplexMatrix::diag_real(&[3.0, -5.0])) - 5.0).abs() < 1e-14);
        assert!((operator_norm(&real(&[&[0.0, 2.0], &[0.0, 0.0]])) - 2.0).abs() < 1e-14);
        assert_eq!(min_singular_value(&real(&[&[0.0, 2.0], &[0.0, 0.0]])), 0.0);
    }

    #[test]
    fn range_basis_of_rank_one() {
        let m = real(&[&[1.0, 2.0], &[0.0, 0.0], &[0.0, 0.0]]);
        let q = range_basis(&m, 1e-12);
        assert_eq!(q.cols(), 1);
        assert!((q[(0, 0)].norm() - 1.0).abs() < 1e-14);
        assert_eq!(range_basis(&ComplexMatrix::zeros(2, 2), 1e-12).cols(), 0);
    }

    #[test]
    fn from_vec_validates() {
        assert!(ComplexMatrix::from_vec(2, 2, vec![ZERO; 3]).is_err());
        assert!(ComplexMatrix::from_vec(1, 1, vec![c(f64::NAN, 0.0)]).is_err());
    }
}
