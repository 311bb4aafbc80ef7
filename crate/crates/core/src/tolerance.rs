use serde::{Deserialize, Serialize};

/// Numerical tolerances used across the crate.
///
/// All values are relative unless the field doc says otherwise.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct Tolerances {
    /// Eigendecomposition reconstruction and orthonormality.
    pub tol_eig: f64,
    /// Accepted Hermitian asymmetry, relative to `max(1, ‖M‖_F)`.
    pub tol_herm: f64,
    /// Positive-definiteness / injectivity threshold, relative to the largest eigenvalue.
    pub tol_pd: f64,
    /// Linear-solve residual.
    pub tol_solve: f64,
    /// Rank decision for frames: lower bound must exceed `frame_rel * upper`.
    pub frame_rel: f64,
    /// Principal-angle overlap allowed between ranges declared orthogonal.
    pub tol_orth: f64,
    /// Slack accepted on operator-inequality hypotheses (min eigenvalue of the slack operator).
    pub tol_hyp: f64,
    /// Conclusion checks: bound containment, reconstruction and dual residuals.
    pub tol_check: f64,
    /// Algebraic identities: adjointness, factorization, spectral bracketing.
    pub tol_identity: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Self {
            tol_eig: 1e-10,
            tol_herm: 1e-8,
            tol_pd: 1e-10,
            tol_solve: 1e-9,
            frame_rel: 1e-10,
            tol_orth: 1e-10,
            tol_hyp: 1e-10,
            tol_check: 1e-8,
            tol_identity: 1e-10,
        }
    }
}

impl Tolerances {
    /// Multiplies every tolerance by `factor`.
    pub fn scaled(self, factor: f64) -> Self {
        Self {
            tol_eig: self.tol_eig * factor,
            tol_herm: self.tol_herm * factor,
            tol_pd: self.tol_pd * factor,
            tol_solve: self.tol_solve * factor,
            frame_rel: self.frame_rel * factor,
            tol_orth: self.tol_orth * factor,
            tol_hyp: self.tol_hyp * factor,
            tol_check: self.tol_check * factor,
            tol_identity: self.tol_identity * factor,
        }
    }
}
