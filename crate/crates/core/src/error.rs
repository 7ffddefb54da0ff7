use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error("non-finite input: {0}")]
    NonFinite(String),

    /// `𝔪(α⁻¹)` is numerically zero, so the inverse of the compressed
    /// coefficient does not exist.
    #[error(
        "𝔪(α⁻¹) = {mean_inv:e} vanishes (threshold {threshold:e}): the one-dimensional \
         well-posedness hypothesis fails; see the homogenisation case a (degenerate limit)"
    )]
    IllPosed { mean_inv: f64, threshold: f64 },

    #[error("contract violation: {0}")]
    ContractViolation(String),

    #[error("pole: {0}")]
    Pole(String),

    #[error("grid of {cells} cells is not aligned with {slabs} slabs")]
    MisalignedGrid { cells: usize, slabs: usize },

    #[error("formula withheld: {0}")]
    FormulaWithheld(String),

    #[error("singular system: {0}")]
    Singular(String),

    #[error("eigen-extraction did not converge; trace: {trace:?}")]
    NonConvergence { trace: Vec<(f64, f64)> },
}

pub(crate) fn ensure_finite(what: &str, values: &[f64]) -> Result<()> {
    match values.iter().position(|v| !v.is_finite()) {
        Some(i) => Err(Error::NonFinite(format!("{what}[{i}] = {}", values[i]))),
        None => Ok(()),
    }
}
