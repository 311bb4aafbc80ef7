use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("shape mismatch in {op}: expected {expected}, got {got}")]
    Shape {
        op: &'static str,
        expected: String,
        got: String,
    },

    #[error("domain error: {0}")]
    Domain(String),

    /// Matrix is not (numerically) positive definite.
    #[error("matrix is singular or indefinite: min eigenvalue {min_eigenvalue:e}")]
    Singular { min_eigenvalue: f64 },

    #[error("sequence is not a frame: lower bound {lower:e} <= frame tolerance {tol:e}")]
    NotAFrame { lower: f64, tol: f64 },

    #[error("precondition failed: {0}")]
    Precondition(String),

    #[error("range orthogonality violated: max overlap {overlap:e} at index {index}")]
    Orthogonality { overlap: f64, index: usize },

    #[error("invalid scenario at `{path}`: {message}")]
    Scenario { path: String, message: String },

    #[error("unsupported schema_version {0} (expected 1)")]
    Version(i64),
}

impl Error {
    pub(crate) fn shape(op: &'static str, expected: impl ToString, got: impl ToString) -> Self {
        Error::Shape {
            op,
            expected: expected.to_string(),
            got: got.to_string(),
        }
    }

    /// True for errors caused by malformed input rather than numerics.
    pub fn is_validation(&self) -> bool {
        matches!(self, Error::Scenario { .. } | Error::Version(_))
    }
}
