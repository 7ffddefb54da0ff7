use serde::{Deserialize, Serialize};

/// Numerical thresholds used wherever an exact condition (`p ≠ 0`,
/// `𝔪(α⁻¹) ≠ 0`, ...) has to be decided in floating point.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Tolerances {
    /// Relative threshold for "value vanishes" decisions, measured against the
    /// magnitude of the largest intermediate product term.
    pub eps_p: f64,
    /// `|𝔪(α⁻¹)|` below `degeneracy · max|1/α_j|` counts as zero. The same
    /// relative rule is applied to `𝔪(α)` with `max|α_j|`.
    pub degeneracy: f64,
    /// Absolute bisection width for eigenvalue extraction (relative to the
    /// spectral bound of the matrix).
    pub eigensolver: f64,
    /// Coefficient values with `|α_j|` at or below this are rejected.
    pub value_zero: f64,
    /// Residual accepted when re-evaluating a reported root.
    pub root_residual: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Tolerances {
            eps_p: 1e-9,
            degeneracy: 1e-12,
            eigensolver: 1e-12,
            value_zero: 1e-12,
            root_residual: 1e-9,
        }
    }
}

impl Tolerances {
    pub fn with_eps_p(mut self, eps_p: f64) -> Self {
        self.eps_p = eps_p;
        self
    }

    pub fn with_degeneracy(mut self, degeneracy: f64) -> Self {
        self.degeneracy = degeneracy;
        self
    }

    pub fn with_eigensolver(mut self, eigensolver: f64) -> Self {
        self.eigensolver = eigensolver;
        self
    }
}
