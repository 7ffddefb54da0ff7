//! Well-posedness, inner spectra and homogenised limits for the divergence-form
//! operator `-div α(x₁) grad` with piecewise-constant, possibly sign-changing,
//! laminated coefficients.
//!
//! The crate is organised bottom-up:
//!
//! - [`laminate`]: profiles, slab transition matrices, the characteristic
//!   function `p_{α,β}`, the polynomial `p_α(t)`, `χ(α)` and the tanh-scaled
//!   forms `q̃`/`w̃`.
//! - [`one_dim`]: one-dimensional well-posedness, the projected-inverse
//!   solution formula and the exact 1-D inner spectrum.
//! - [`multi_dim`]: the `q̃`-criterion, the polynomial well-posedness test and
//!   the discrete inner-spectrum scan on `(0,1) × Ω̂`.
//! - [`homogenisation`]: case classification, classical and holomorphic
//!   G-limits and their inner spectra.
//! - [`oracle`]: independent finite-difference and Fourier–Galerkin
//!   discretisations used to cross-check everything above.

pub mod error;
pub mod homogenisation;
pub mod laminate;
pub mod multi_dim;
pub mod one_dim;
pub mod oracle;
pub mod poly;
pub mod tolerance;

pub use error::{Error, Result};
pub use laminate::LaminateProfile;
pub use tolerance::Tolerances;
