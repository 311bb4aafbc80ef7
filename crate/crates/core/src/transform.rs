//! The mixing matrix `E` and its action `Mₙ = Σₖ E_{n,k} Λₖ` on operator sequences.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::OperatorSequence;
use crate::numerics::{min_singular_value, ComplexMatrix, C64, ONE, ZERO};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum TransformKind {
    Identity,
    Delta,
    Banded,
    Dense,
}

/// Truncated `N × N` transform. Every kind is stored dense; the tag only records provenance.
#[derive(Debug, Clone, PartialEq)]
pub struct TransformMatrix {
    entries: ComplexMatrix,
    kind: TransformKind,
}

impl TransformMatrix {
    pub fn size(&self) -> usize {
        self.entries.rows()
    }

    pub fn entries(&self) -> &ComplexMatrix {
        &self.entries
    }

    pub fn kind(&self) -> TransformKind {
        self.kind
    }

    pub fn entry(&self, n: usize, k: usize) -> C64 {
        self.entries[(n, k)]
    }

    pub fn smallest_singular_value(&self) -> f64 {
        min_singular_value(&self.entries)
    }

    /// Smallest singular value exceeds `tol` times the largest.
    pub fn is_invertible(&self, tol: f64) -> bool {
        let smin = self.smallest_singular_value();
        let smax = crate::numerics::operator_norm(&self.entries);
        smax > 0.0 && smin > tol * smax
    }

    /// Entrywise complex conjugate, same kind.
    pub fn conjugate(&self) -> Self {
        let e = &self.entries;
        Self {
            entries: ComplexMatrix::from_fn(e.rows(), e.cols(), |i, j| e[(i, j)].conj()),
            kind: self.kind,
        }
    }

    /// `E₁·E₂` as a dense transform.
    pub fn compose(&self, other: &Self) -> Result<Self> {
        make_dense(crate::numerics::matmul(&self.entries, &other.entries)?)
    }
}

pub fn make_identity(n: usize) -> Result<TransformMatrix> {
    if n == 0 {
        return Err(Error::Domain("transform size must be >= 1".into()));
    }
    Ok(TransformMatrix {
        entries: ComplexMatrix::identity(n),
        kind: TransformKind::Identity,
    })
}

/// Unit lower bidiagonal difference matrix: `(Δx)ₙ = xₙ − xₙ₋₁`, `x₀ = 0`.
pub fn make_delta(n: usize) -> Result<TransformMatrix> {
    if n == 0 {
        return Err(Error::Domain("transform size must be >= 1".into()));
    }
    let entries = ComplexMatrix::from_fn(n, n, |i, j| {
        if i == j {
            ONE
        } else if i == j + 1 {
            -ONE
        } else {
            ZERO
        }
    });
    Ok(TransformMatrix {
        entries,
        kind: TransformKind::Delta,
    })
}

/// Banded transform from `(offset, value)` diagonals; offset `k - n` (negative = below).
pub fn make_banded(n: usize, bands: &[(i64, C64)]) -> Result<TransformMatrix> {
    if n == 0 {
        return Err(Error::Domain("transform size must be >= 1".into()));
    }
    let mut entries = ComplexMatrix::zeros(n, n);
    for &(offset, value) in bands {
        if !value.re.is_finite() || !value.im.is_finite() {
            return Err(Error::Domain(format!("band {offset} has a non-finite value")));
        }
        if offset.unsigned_abs() as usize >= n {
            return Err(Error::Domain(format!("band offset {offset} outside a {n}x{n} matrix")));
        }
        for row in 0..n {
            let col = row as i64 + offset;
            if (0..n as i64).contains(&col) {
                entries[(row, col as usize)] += value;
            }
        }
    }
    Ok(TransformMatrix {
        entries,
        kind: TransformKind::Banded,
    })
}

/// Stores `entries` verbatim.
pub fn make_dense(entries: ComplexMatrix) -> Result<TransformMatrix> {
    if !entries.is_square() || entries.rows() == 0 {
        return Err(Error::shape(
            "make_dense",
            "non-empty square matrix",
            format!("{:?}", entries.shape()),
        ));
    }
    if !entries.is_finite() {
        return Err(Error::Domain("transform has non-finite entries".into()));
    }
    Ok(TransformMatrix {
        entries,
        kind: TransformKind::Dense,
    })
}

/// `{Mₙ}` with `Mₙ = Σₖ E_{n,k} Λₖ`, each `p × d`.
#[derive(Debug, Clone, PartialEq)]
pub struct TransformedSequence {
    operators: Vec<ComplexMatrix>,
    source_kind: TransformKind,
}

impl TransformedSequence {
    pub fn operators(&self) -> &[ComplexMatrix] {
        &self.operators
    }

    pub fn source_kind(&self) -> TransformKind {
        self.source_kind
    }

    /// All `Mₙ` stacked vertically into one `(N·p) × d` matrix (the analysis operator).
    pub fn stacked(&self) -> ComplexMatrix {
        ComplexMatrix::vstack(&self.operators).expect("transformed operators share a shape")
    }
}

/// Matrix linear combination, `k` ascending.
pub fn apply_transform(e: &TransformMatrix, seq: &OperatorSequence) -> Result<TransformedSequence> {
    let n_terms = seq.term_count();
    if e.size() != n_terms {
        return Err(Error::shape(
            "apply_transform",
            format!("transform of size {n_terms}"),
            format!("size {}", e.size()),
        ));
    }
    let (p, d) = (seq.pad_dim(), seq.dim());
    let mut operators = Vec::with_capacity(n_terms);
    for n in 0..n_terms {
        let mut m = ComplexMatrix::zeros(p, d);
        for (k, op) in seq.operators().iter().enumerate() {
            let c = e.entry(n, k);
            if c != ZERO {
                m.axpy(c, op)?;
            }
        }
        operators.push(m);
    }
    Ok(TransformedSequence {
        operators,
        source_kind: e.kind(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::OperatorSequence;

    fn seq2() -> OperatorSequence {
        OperatorSequence::from_operators(vec![
            ComplexMatrix::from_real_rows(&[&[1.0, 2.0]]).unwrap(),
            ComplexMatrix::from_real_rows(&[&[-1.0, 0.5]]).unwrap(),
        ])
        .unwrap()
    }

    #[test]
    fn identity_examples() {
        assert_eq!(make_identity(1).unwrap().entries(), &ComplexMatrix::identity(1));
        assert_eq!(make_identity(3).unwrap().entries(), &ComplexMatrix::identity(3));
        let s = seq2();
        let m = apply_transform(&make_identity(2).unwrap(), &s).unwrap();
        assert_eq!(m.operators(), s.operators());
        assert!(make_identity(0).is_err());
    }

    #[test]
    fn delta_matches_display() {
        let d = make_delta(3).unwrap();
        let expect = ComplexMatrix::from_real_rows(&[&[1.0, 0.0, 0.0], &[-1.0, 1.0, 0.0], &[0.0, -1.0, 1.0]]).unwrap();
        assert_eq!(d.entries(), &expect);
        assert_eq!(d.kind(), TransformKind::Delta);
        assert_eq!(make_delta(1).unwrap().entries(), &ComplexMatrix::identity(1));
        assert!(d.is_invertible(1e-10));
    }

    #[test]
    fn delta_takes_differences() {
        let s = seq2();
        let m = apply_transform(&make_delta(2).unwrap(), &s).unwrap();
        assert_eq!(&m.operators()[0], s.operator(0));
        assert_eq!(m.operators()[1], s.operator(1).sub(s.operator(0)).unwrap());
    }

    #[test]
    fn banded_reproduces_delta() {
        let b = make_banded(4, &[(0, ONE), (-1, -ONE)]).unwrap();
        assert_eq!(b.entries(), make_delta(4).unwrap().entries());
        assert_eq!(b.kind(), TransformKind::Banded);
        assert!(make_banded(2, &[(2, ONE)]).is_err());
    }

    #[test]
    fn dense_validation() {
        assert!(make_dense(ComplexMatrix::zeros(2, 3)).is_err());
        let t = make_dense(ComplexMatrix::from_real_rows(&[&[2.0]]).unwrap()).unwrap();
        assert_eq!(t.size(), 1);
        assert_eq!(t.kind(), TransformKind::Dense);
    }

    #[test]
    fn size_mismatch_is_an_error() {
        assert!(apply_transform(&make_identity(3).unwrap(), &seq2()).is_err());
    }
}
