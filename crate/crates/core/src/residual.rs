//! Pointwise residuals with the magnitude of the terms that produced them.

use serde::{Deserialize, Serialize};

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Residual {
    /// Sup-coefficient of the defect.
    pub abs: f64,
    /// Largest sup-coefficient among the terms entering the identity.
    pub scale: f64,
}

impl Residual {
    pub fn new(abs: f64, scale: f64) -> Self {
        Residual { abs, scale }
    }

    /// Residual of `lhs − rhs` given the two sup norms and the defect.
    pub fn of(abs: f64, terms: &[f64]) -> Self {
        Residual {
            abs,
            scale: terms.iter().copied().fold(0.0, f64::max),
        }
    }

    /// `abs / scale`, or `abs` when the scale is below `floor`.
    pub fn relative(&self, floor: f64) -> f64 {
        self.abs / self.scale.max(floor)
    }

    /// Pass iff `abs ≤ max(tol_abs, tol_rel · scale)`.
    pub fn passes(&self, tol_abs: f64, tol_rel: f64) -> bool {
        self.abs.is_finite() && self.abs <= tol_abs.max(tol_rel * self.scale)
    }

    /// Normalised figure of merit, `≤ tol_rel` iff `passes` (needs `tol_rel > 0`).
    pub fn normalized(&self, tol_abs: f64, tol_rel: f64) -> f64 {
        self.abs / (tol_abs / tol_rel).max(self.scale)
    }

    pub fn max(self, other: Residual) -> Residual {
        Residual {
            abs: self.abs.max(other.abs),
            scale: self.scale.max(other.scale),
        }
    }
}
