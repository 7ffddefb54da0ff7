//! Case classification of periodic laminates `α(n·)` in `d ≥ 2`
//! dimensions, their (holomorphic) G-limits and the inner spectra of the
//! limits on the box `(0,1)^d`.
//!
//! Holomorphic limits are represented through their Fourier-mode
//! multipliers `λ ↦ f_k(λ)` on the sine basis of the box.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::laminate::LaminateProfile;
use crate::one_dim::{mean, mean_inv, mean_resolvent};
use crate::tolerance::Tolerances;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum HomogenisationCase {
    /// `𝔪(α⁻¹) = 0`
    DegenerateA,
    /// `𝔪(α) = 0`, `𝔪(α⁻¹) ≠ 0`
    FourthOrderB,
    /// `𝔪(α) ≠ 0`, `𝔪(α⁻¹) ≠ 0`
    DiagonalC,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "case", rename_all = "snake_case")]
pub enum HomogenisedLimit {
    /// Limit relation `{0} × L₂`-type degeneration.
    DegenerateA { dim: usize },
    /// Limit `−factor · Δ_{(0,1)} (−Δ_{(0,1)^{d−1}})⁻¹`.
    FourthOrderB { factor: f64 },
    /// Classical diagonal limit coefficient.
    DiagonalC { entries: Vec<f64> },
    Scalar1D { coefficient: f64 },
}

pub fn mean_threshold(alpha: &LaminateProfile, tol: &Tolerances) -> f64 {
    tol.degeneracy * alpha.max_abs()
}

pub fn classify(alpha: &LaminateProfile, tol: &Tolerances) -> HomogenisationCase {
    if mean_inv(alpha).abs() <= crate::one_dim::degeneracy_threshold(alpha, tol) {
        HomogenisationCase::DegenerateA
    } else if mean(alpha).abs() <= mean_threshold(alpha, tol) {
        HomogenisationCase::FourthOrderB
    } else {
        HomogenisationCase::DiagonalC
    }
}

fn require_dim(dim: usize) -> Result<()> {
    if dim < 2 {
        return Err(Error::InvalidInput(format!("dimension must be at least 2, got {dim}")));
    }
    Ok(())
}

pub fn limit_coefficient(
    alpha: &LaminateProfile,
    dim: usize,
    tol: &Tolerances,
) -> Result<HomogenisedLimit> {
    require_dim(dim)?;
    Ok(match classify(alpha, tol) {
        HomogenisationCase::DegenerateA => HomogenisedLimit::DegenerateA { dim },
        HomogenisationCase::FourthOrderB => HomogenisedLimit::FourthOrderB {
            factor: 1.0 / mean_inv(alpha),
        },
        HomogenisationCase::DiagonalC => {
            let mut entries = vec![mean(alpha); dim];
            entries[0] = 1.0 / mean_inv(alpha);
            HomogenisedLimit::DiagonalC { entries }
        }
    })
}

fn mode_sums(k: &[u32]) -> Result<(f64, f64)> {
    if k.len() < 2 || k.contains(&0) {
        return Err(Error::InvalidInput(format!(
            "mode index must have at least 2 positive entries, got {k:?}"
        )));
    }
    let k1 = f64::from(k[0]).powi(2);
    let rest = k[1..].iter().map(|&v| f64::from(v).powi(2)).sum();
    Ok((k1, rest))
}

/// `𝔪((α−λ)⁻¹) Σk² / (k₁² + 𝔪((α−λ)⁻¹) 𝔪(α−λ) Σ_{m≥2} k²)`
pub fn resolvent_multiplier(alpha: &LaminateProfile, lambda: Complex64, k: &[u32]) -> Result<Complex64> {
    let (k1, rest) = mode_sums(k)?;
    let m_res = mean_resolvent(alpha, lambda)?;
    let m_shift = Complex64::new(mean(alpha), 0.0) - lambda;
    let den = k1 + m_res * m_shift * rest;
    let scale = k1 + (m_res * m_shift).norm() * rest;
    if den.norm() <= 1e-14 * scale {
        return Err(Error::Pole(format!("multiplier denominator vanishes at λ = {lambda}, k = {k:?}")));
    }
    Ok(m_res * (k1 + rest) / den)
}

/// The `λ = 0` value of [`resolvent_multiplier`].
pub fn multiplier_at_zero(alpha: &LaminateProfile, k: &[u32]) -> Result<f64> {
    let (k1, rest) = mode_sums(k)?;
    let mi = mean_inv(alpha);
    let den = k1 + mi * mean(alpha) * rest;
    if den.abs() <= 1e-14 * (k1 + (mi * mean(alpha)).abs() * rest) {
        return Err(Error::Pole(format!("multiplier at 0 has a pole for k = {k:?}")));
    }
    Ok(mi * (k1 + rest) / den)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SpectrumKind {
    AllOfC,
    CountableClosure,
    Empty,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Accumulation {
    At(f64),
    Infinity,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LimitPoint {
    pub value: f64,
    /// Lexicographically first mode producing `value`.
    pub k: Vec<u32>,
}

/// Truncated generator set of an inner spectrum; the spectrum is the
/// closure of the full (untruncated) set.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LimitSpectrum {
    pub kind: SpectrumKind,
    pub points: Vec<LimitPoint>,
    pub accumulation: Vec<Accumulation>,
    pub generator: String,
}

impl LimitSpectrum {
    pub fn values(&self) -> Vec<f64> {
        self.points.iter().map(|p| p.value).collect()
    }
}

/// All `k ∈ {1..k_max}^dim`, lexicographic.
pub fn modes(dim: usize, k_max: u32) -> Vec<Vec<u32>> {
    let mut out = vec![Vec::with_capacity(dim)];
    for _ in 0..dim {
        out = out
            .into_iter()
            .flat_map(|prefix| {
                (1..=k_max).map(move |v| {
                    let mut next = prefix.clone();
                    next.push(v);
                    next
                })
            })
            .collect();
    }
    out
}

fn enumerate_points(
    dim: usize,
    k_max: u32,
    f: impl Fn(f64, f64) -> f64,
) -> Result<Vec<LimitPoint>> {
    require_dim(dim)?;
    if k_max == 0 {
        return Err(Error::InvalidInput("k_max must be at least 1".into()));
    }
    let mut pts: Vec<LimitPoint> = modes(dim, k_max)
        .into_iter()
        .map(|k| {
            let (k1, rest) = mode_sums(&k).expect("modes are positive");
            LimitPoint { value: f(k1, rest), k }
        })
        .collect();
    // stable sort keeps the lexicographically first k within each value
    pts.sort_by(|a, b| a.value.total_cmp(&b.value));
    pts.dedup_by(|b, a| (a.value - b.value).abs() <= 1e-14 * a.value.abs().max(b.value.abs()));
    Ok(pts)
}

/// Inner spectrum of the homogenised limit on `(0,1)^dim`, generated over
/// `k ∈ {1..k_max}^dim`.
pub fn limit_inner_spectrum(
    alpha: &LaminateProfile,
    dim: usize,
    k_max: u32,
    tol: &Tolerances,
) -> Result<LimitSpectrum> {
    require_dim(dim)?;
    match classify(alpha, tol) {
        HomogenisationCase::DegenerateA => Ok(LimitSpectrum {
            kind: SpectrumKind::AllOfC,
            points: Vec::new(),
            accumulation: Vec::new(),
            generator: "all of C".into(),
        }),
        HomogenisationCase::FourthOrderB => {
            let factor = 1.0 / mean_inv(alpha);
            Ok(LimitSpectrum {
                kind: SpectrumKind::CountableClosure,
                points: enumerate_points(dim, k_max, |k1, rest| factor * k1 / rest)?,
                accumulation: vec![Accumulation::At(0.0), Accumulation::Infinity],
                generator: format!("{factor:e} * k1^2 / (k2^2 + ... + kd^2)"),
            })
        }
        HomogenisationCase::DiagonalC => {
            let mi = mean_inv(alpha);
            let product = mi * mean(alpha);
            if product <= 0.0 {
                return Err(Error::FormulaWithheld(format!(
                    "m(α)·m(α⁻¹) = {product:e} < 0: no closed form for the limit inner spectrum"
                )));
            }
            Ok(LimitSpectrum {
                kind: SpectrumKind::CountableClosure,
                points: enumerate_points(dim, k_max, |k1, rest| mi * (k1 + rest) / (k1 + product * rest))?,
                accumulation: Vec::new(),
                generator: format!("{mi:e} * |k|^2 / (k1^2 + {product:e} * (k2^2 + ... + kd^2))"),
            })
        }
    }
}

/// Inner spectrum of `Γ = diag(γ, 1, …, 1)` on the gradient fields of `(0,1)^dim`.
pub fn gamma_inner_spectrum(gamma: f64, dim: usize, k_max: u32) -> Result<LimitSpectrum> {
    if !(gamma.is_finite() && gamma > 0.0) {
        return Err(Error::InvalidInput(format!("γ must be positive and finite, got {gamma}")));
    }
    Ok(LimitSpectrum {
        kind: SpectrumKind::CountableClosure,
        points: enumerate_points(dim, k_max, |k1, rest| (gamma * k1 + rest) / (k1 + rest))?,
        accumulation: Vec::new(),
        generator: format!("({gamma:e} * k1^2 + k2^2 + ... + kd^2) / |k|^2"),
    })
}

/// Inner spectrum of the classical limit `diag(1/𝔪(α⁻¹), 𝔪(α), …)` read as
/// `𝔪(α) · Γ` with `γ = 1/(𝔪(α⁻¹)𝔪(α))`. Mode-wise this is the reciprocal of
/// the generator in [`limit_inner_spectrum`].
pub fn laminate_gamma_route_spectrum(
    alpha: &LaminateProfile,
    dim: usize,
    k_max: u32,
    tol: &Tolerances,
) -> Result<LimitSpectrum> {
    if classify(alpha, tol) != HomogenisationCase::DiagonalC {
        return Err(Error::InvalidInput("the Γ route needs both means nonzero".into()));
    }
    let m = mean(alpha);
    let product = mean_inv(alpha) * m;
    if product <= 0.0 {
        return Err(Error::FormulaWithheld(format!(
            "m(α)·m(α⁻¹) = {product:e} < 0: Γ would be indefinite"
        )));
    }
    let g = gamma_inner_spectrum(1.0 / product, dim, k_max)?;
    let mut points: Vec<LimitPoint> = g
        .points
        .into_iter()
        .map(|p| LimitPoint { value: m * p.value, k: p.k })
        .collect();
    points.sort_by(|a, b| a.value.total_cmp(&b.value));
    Ok(LimitSpectrum {
        kind: SpectrumKind::CountableClosure,
        points,
        accumulation: Vec::new(),
        generator: format!("{m:e} * ({:e} * k1^2 + k2^2 + ... + kd^2) / |k|^2", 1.0 / product),
    })
}
