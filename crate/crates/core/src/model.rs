//! Finite truncations of the objects in the E-g-frame definitions.
//!
//! The ambient space is `ℂ^d`. Each codomain `Hₙ` has dimension `dₙ` and is
//! embedded in a common padded space `ℂ^p`, `p = max dₙ`, so that mixed sums
//! `Σₖ E_{n,k} Λₖ f` are well typed. Padding rows are always exactly zero.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::numerics::{ComplexMatrix, C64};

/// Truncated model of the ambient Hilbert space, `ℂ^d`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct AmbientSpace {
    dim: usize,
}

impl AmbientSpace {
    pub fn new(dim: usize) -> Result<Self> {
        if dim == 0 {
            return Err(Error::Domain("ambient dimension must be >= 1".into()));
        }
        Ok(Self { dim })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }
}

/// Dimensions of the codomains `H₁ … H_N` and the padded dimension `p`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SubspaceFamily {
    codomain_dims: Vec<usize>,
    pad_dim: usize,
}

impl SubspaceFamily {
    pub fn new(codomain_dims: Vec<usize>) -> Result<Self> {
        if codomain_dims.is_empty() {
            return Err(Error::Domain("subspace family needs at least one term".into()));
        }
        if let Some(n) = codomain_dims.iter().position(|&d| d == 0) {
            return Err(Error::Domain(format!("codomain dimension at index {n} is zero")));
        }
        let pad_dim = *codomain_dims.iter().max().expect("non-empty");
        Ok(Self { codomain_dims, pad_dim })
    }

    /// `N` copies of a `p`-dimensional codomain.
    pub fn uniform(term_count: usize, dim: usize) -> Result<Self> {
        Self::new(vec![dim; term_count])
    }

    pub fn term_count(&self) -> usize {
        self.codomain_dims.len()
    }

    pub fn pad_dim(&self) -> usize {
        self.pad_dim
    }

    pub fn codomain_dims(&self) -> &[usize] {
        &self.codomain_dims
    }

    /// Dimension of `Hₙ`, 1-based like the index of the sequence.
    pub fn codomain_dim(&self, index_n: usize) -> Option<usize> {
        index_n.checked_sub(1).and_then(|i| self.codomain_dims.get(i)).copied()
    }
}

/// Zero-pads a vector of `Hₙ` into `ℂ^p`. `index_n` is 1-based.
pub fn embed(vector: &ComplexMatrix, family: &SubspaceFamily, index_n: usize) -> Result<ComplexMatrix> {
    let dn = family
        .codomain_dim(index_n)
        .ok_or_else(|| Error::Domain(format!("index {index_n} out of range 1..={}", family.term_count())))?;
    if vector.shape() != (dn, 1) {
        return Err(Error::shape(
            "embed",
            format!("({dn}, 1)"),
            format!("{:?}", vector.shape()),
        ));
    }
    Ok(ComplexMatrix::from_fn(family.pad_dim(), 1, |i, _| {
        if i < dn {
            vector[(i, 0)]
        } else {
            C64::new(0.0, 0.0)
        }
    }))
}

/// An ordered family `{Λₙ}`, each `Λₙ` a `p × d` matrix whose rows past `dₙ` vanish.
#[derive(Debug, Clone, PartialEq)]
pub struct OperatorSequence {
    space: AmbientSpace,
    family: SubspaceFamily,
    operators: Vec<ComplexMatrix>,
}

impl OperatorSequence {
    /// Validates shapes and the zero-padding invariant; violating inputs are rejected.
    pub fn new(space: AmbientSpace, family: SubspaceFamily, operators: Vec<ComplexMatrix>) -> Result<Self> {
        if operators.len() != family.term_count() {
            return Err(Error::shape(
                "OperatorSequence",
                format!("{} operators", family.term_count()),
                format!("{} operators", operators.len()),
            ));
        }
        let (p, d) = (family.pad_dim(), space.dim());
        for (n, (op, &dn)) in operators.iter().zip(family.codomain_dims()).enumerate() {
            if op.shape() != (p, d) {
                return Err(Error::shape(
                    "OperatorSequence",
                    format!("({p}, {d}) for operator {}", n + 1),
                    format!("{:?}", op.shape()),
                ));
            }
            if !op.is_finite() {
                return Err(Error::Domain(format!("operator {} has non-finite entries", n + 1)));
            }
            for i in dn..p {
                if op.row(i).iter().any(|z| z.re != 0.0 || z.im != 0.0) {
                    return Err(Error::Domain(format!(
                        "operator {} has non-zero padding row {} (codomain dim {dn})",
                        n + 1,
                        i + 1
                    )));
                }
            }
        }
        Ok(Self {
            space,
            family,
            operators,
        })
    }

    /// All codomains equal to the operators' row count.
    pub fn from_operators(operators: Vec<ComplexMatrix>) -> Result<Self> {
        let first = operators
            .first()
            .ok_or_else(|| Error::Domain("operator sequence needs at least one term".into()))?;
        let (p, d) = first.shape();
        Self::new(
            AmbientSpace::new(d)?,
            SubspaceFamily::uniform(operators.len(), p)?,
            operators,
        )
    }

    pub fn space(&self) -> AmbientSpace {
        self.space
    }

    pub fn family(&self) -> &SubspaceFamily {
        &self.family
    }

    pub fn dim(&self) -> usize {
        self.space.dim()
    }

    pub fn term_count(&self) -> usize {
        self.operators.len()
    }

    pub fn pad_dim(&self) -> usize {
        self.family.pad_dim()
    }

    pub fn operators(&self) -> &[ComplexMatrix] {
        &self.operators
    }

    pub fn operator(&self, n: usize) -> &ComplexMatrix {
        &self.operators[n]
    }

    /// Applies `f` to every operator, keeping the family. The result is revalidated.
    pub fn try_map(&self, f: impl Fn(usize, &ComplexMatrix) -> Result<ComplexMatrix>) -> Result<Self> {
        let ops = self
            .operators
            .iter()
            .enumerate()
            .map(|(n, op)| f(n, op))
            .collect::<Result<Vec<_>>>()?;
        let space = AmbientSpace::new(ops.first().map_or(0, |m| m.cols()))?;
        Self::new(space, self.family.clone(), ops)
    }

    /// `{Λₙ·U}`
    pub fn compose_right(&self, u: &ComplexMatrix) -> Result<Self> {
        self.try_map(|_, op| crate::numerics::matmul(op, u))
    }

    /// `{c·Λₙ}`
    pub fn scaled(&self, c: C64) -> Self {
        Self {
            space: self.space,
            family: self.family.clone(),
            operators: self.operators.iter().map(|op| op.scale(c)).collect(),
        }
    }

    /// `{wₙ·Λₙ}`
    pub fn weighted(&self, w: &WeightSequence) -> Result<Self> {
        if w.len() != self.term_count() {
            return Err(Error::shape("weighted", self.term_count(), w.len()));
        }
        Ok(Self {
            space: self.space,
            family: self.family.clone(),
            operators: self
                .operators
                .iter()
                .zip(w.values())
                .map(|(op, &c)| op.scale(c))
                .collect(),
        })
    }

    /// Termwise `a·Λₙ + b·Γₙ`; codomain dims are the termwise maxima.
    pub fn combine(&self, a: C64, other: &Self, b: C64) -> Result<Self> {
        if self.term_count() != other.term_count() || self.dim() != other.dim() || self.pad_dim() != other.pad_dim() {
            return Err(Error::shape(
                "combine",
                format!("N={}, d={}, p={}", self.term_count(), self.dim(), self.pad_dim()),
                format!("N={}, d={}, p={}", other.term_count(), other.dim(), other.pad_dim()),
            ));
        }
        let dims = self
            .family
            .codomain_dims()
            .iter()
            .zip(other.family.codomain_dims())
            .map(|(&x, &y)| x.max(y))
            .collect();
        let ops = self
            .operators
            .iter()
            .zip(&other.operators)
            .map(|(x, y)| {
                let mut out = x.scale(a);
                out.axpy(b, y)?;
                Ok(out)
            })
            .collect::<Result<Vec<_>>>()?;
        Self::new(self.space, SubspaceFamily::new(dims)?, ops)
    }

    /// Re-embeds every operator into a larger padded space, placing its rows at `row_offset`.
    pub fn embed_rows(&self, new_pad: usize, row_offset: usize) -> Result<Self> {
        if row_offset + self.pad_dim() > new_pad {
            return Err(Error::shape(
                "embed_rows",
                format!("pad >= {}", row_offset + self.pad_dim()),
                new_pad,
            ));
        }
        let ops = self
            .operators
            .iter()
            .map(|op| {
                let mut out = ComplexMatrix::zeros(new_pad, self.dim());
                for i in 0..op.rows() {
                    for j in 0..op.cols() {
                        out[(row_offset + i, j)] = op[(i, j)];
                    }
                }
                out
            })
            .collect();
        Self::new(self.space, SubspaceFamily::uniform(self.term_count(), new_pad)?, ops)
    }
}

/// Element of the truncated direct sum `(⊕ₙ Hₙ)_{ℓ²}`, stored as `N` padded blocks.
#[derive(Debug, Clone, PartialEq)]
pub struct StackedVector {
    blocks: Vec<ComplexMatrix>,
}

impl StackedVector {
    pub fn new(blocks: Vec<ComplexMatrix>) -> Result<Self> {
        let p = blocks.first().map_or(0, ComplexMatrix::rows);
        if let Some(bad) = blocks.iter().find(|b| b.shape() != (p, 1)) {
            return Err(Error::shape(
                "StackedVector",
                format!("({p}, 1)"),
                format!("{:?}", bad.shape()),
            ));
        }
        Ok(Self { blocks })
    }

    pub fn zeros(term_count: usize, pad_dim: usize) -> Self {
        Self {
            blocks: vec![ComplexMatrix::zeros(pad_dim, 1); term_count],
        }
    }

    pub fn blocks(&self) -> &[ComplexMatrix] {
        &self.blocks
    }

    pub fn len(&self) -> usize {
        self.blocks.len()
    }

    pub fn is_empty(&self) -> bool {
        self.blocks.is_empty()
    }

    /// All blocks concatenated into one column.
    pub fn flatten(&self) -> ComplexMatrix {
        ComplexMatrix::vstack(&self.blocks).expect("blocks share one column")
    }

    /// `Σₙ ⟨blockₙ, otherₙ⟩`
    pub fn inner(&self, other: &StackedVector) -> Result<C64> {
        if self.len() != other.len() {
            return Err(Error::shape("StackedVector::inner", self.len(), other.len()));
        }
        self.blocks.iter().zip(&other.blocks).map(|(a, b)| a.inner(b)).sum()
    }
}

/// `Σₙ ‖blockₙ‖²`
pub fn stacked_norm_sq(v: &StackedVector) -> f64 {
    v.blocks.iter().map(ComplexMatrix::norm_sq).sum()
}

/// Positively confined sequence: `0 < inf |aₙ| <= sup |aₙ| < ∞`.
#[derive(Debug, Clone, PartialEq)]
pub struct WeightSequence {
    values: Vec<C64>,
    inf_abs: f64,
    sup_abs: f64,
}

impl WeightSequence {
    pub fn new(values: Vec<C64>) -> Result<Self> {
        if values.is_empty() {
            return Err(Error::Domain("weight sequence is empty".into()));
        }
        let mut inf_abs = f64::INFINITY;
        let mut sup_abs = 0.0f64;
        for (n, z) in values.iter().enumerate() {
            let a = z.norm();
            if !a.is_finite() {
                return Err(Error::Domain(format!("weight {} is not finite", n + 1)));
            }
            inf_abs = inf_abs.min(a);
            sup_abs = sup_abs.max(a);
        }
        if !(inf_abs > 0.0) {
            return Err(Error::Domain(
                "weights are not positively confined: inf |a_n| = 0".into(),
            ));
        }
        Ok(Self {
            values,
            inf_abs,
            sup_abs,
        })
    }

    pub fn constant(term_count: usize, value: C64) -> Result<Self> {
        Self::new(vec![value; term_count])
    }

    pub fn ones(term_count: usize) -> Self {
        Self::constant(term_count, C64::new(1.0, 0.0)).expect("ones are confined")
    }

    pub fn values(&self) -> &[C64] {
        &self.values
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn inf_abs(&self) -> f64 {
        self.inf_abs
    }

    pub fn sup_abs(&self) -> f64 {
        self.sup_abs
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Classification {
    /// Non-finite data; the upper bound cannot be certified.
    NotBesselGuard,
    BesselOnly,
    Frame,
    Tight,
    Parseval,
}

impl Classification {
    /// Frame, tight or Parseval.
    pub fn is_frame(self) -> bool {
        matches!(self, Self::Frame | Self::Tight | Self::Parseval)
    }

    pub fn as_str(self) -> &'static str {
        match self {
            Self::NotBesselGuard => "not_bessel_guard",
            Self::BesselOnly => "bessel_only",
            Self::Frame => "frame",
            Self::Tight => "tight",
            Self::Parseval => "parseval",
        }
    }
}

#[derive(Debug, Clone)]
pub struct FrameReport {
    pub frame_operator: ComplexMatrix,
    pub lower_opt: f64,
    pub upper_opt: f64,
    pub classification: Classification,
    pub hermiticity_residual: f64,
}
