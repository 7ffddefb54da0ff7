//! One-dimensional problem: integral means, the projected-inverse solution
//! formula and the inner spectrum with respect to `{1}^⊥ ⊆ L₂(0,1)`.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{ensure_finite, Error, Result};
use crate::homogenisation::HomogenisedLimit;
use crate::laminate::LaminateProfile;
use crate::poly::Poly;
use crate::tolerance::Tolerances;

/// Samples on the cell centres `(i + ½)/n` of a uniform grid over `(0, 1)`.
/// Means are midpoint-rule averages, which are exact for slab-constant data
/// when `n` is a multiple of the slab count.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GridFunction {
    samples: Vec<f64>,
}

impl GridFunction {
    pub fn new(samples: Vec<f64>) -> Result<Self> {
        if samples.len() < 2 {
            return Err(Error::InvalidInput("a grid function needs at least 2 cells".into()));
        }
        ensure_finite("samples", &samples)?;
        Ok(GridFunction { samples })
    }

    pub fn from_fn(n: usize, f: impl Fn(f64) -> f64) -> Result<Self> {
        Self::new((0..n).map(|i| f(cell_centre(n, i))).collect())
    }

    pub fn n(&self) -> usize {
        self.samples.len()
    }

    pub fn samples(&self) -> &[f64] {
        &self.samples
    }

    pub fn mean(&self) -> f64 {
        self.samples.iter().sum::<f64>() / self.samples.len() as f64
    }

    pub fn max_abs(&self) -> f64 {
        self.samples.iter().fold(0.0, |m, v| m.max(v.abs()))
    }

    /// `x ↦ ∫₀ˣ f` at the nodes `i/n`, `i = 0..=n`.
    pub fn node_antiderivative(&self) -> Vec<f64> {
        let dx = 1.0 / self.n() as f64;
        let mut out = Vec::with_capacity(self.n() + 1);
        let mut acc = 0.0;
        out.push(0.0);
        for v in &self.samples {
            acc += v * dx;
            out.push(acc);
        }
        out
    }
}

pub(crate) fn cell_centre(n: usize, i: usize) -> f64 {
    (i as f64 + 0.5) / n as f64
}

/// `𝔪(α)`
pub fn mean(alpha: &LaminateProfile) -> f64 {
    alpha.values().iter().sum::<f64>() / alpha.slab_count() as f64
}

/// `𝔪(α⁻¹)`
pub fn mean_inv(alpha: &LaminateProfile) -> f64 {
    alpha.values().iter().map(|v| 1.0 / v).sum::<f64>() / alpha.slab_count() as f64
}

/// `𝔪((α − λ)⁻¹)`; fails when `λ` hits a coefficient value.
pub fn mean_resolvent(alpha: &LaminateProfile, lambda: Complex64) -> Result<Complex64> {
    let pole_tol = 1e-14 * alpha.max_abs().max(1.0);
    let mut acc = Complex64::new(0.0, 0.0);
    for (j, &a) in alpha.values().iter().enumerate() {
        let d = Complex64::new(a, 0.0) - lambda;
        if d.norm() <= pole_tol {
            return Err(Error::Pole(format!("λ = {lambda} coincides with α[{j}] = {a}")));
        }
        acc += d.inv();
    }
    Ok(acc / alpha.slab_count() as f64)
}

/// `𝔪(|α − λ|⁻¹)`, the scale against which `mean_resolvent` is judged zero.
fn mean_abs_resolvent(alpha: &LaminateProfile, lambda: Complex64) -> f64 {
    alpha
        .values()
        .iter()
        .map(|&a| 1.0 / (Complex64::new(a, 0.0) - lambda).norm())
        .sum::<f64>()
        / alpha.slab_count() as f64
}

pub fn degeneracy_threshold(alpha: &LaminateProfile, tol: &Tolerances) -> f64 {
    tol.degeneracy * alpha.max_abs_inv()
}

pub fn is_well_posed_1d(alpha: &LaminateProfile, tol: &Tolerances) -> bool {
    mean_inv(alpha).abs() > degeneracy_threshold(alpha, tol)
}

pub(crate) fn require_nondegenerate(alpha: &LaminateProfile, tol: &Tolerances) -> Result<f64> {
    let m = mean_inv(alpha);
    let threshold = degeneracy_threshold(alpha, tol);
    if m.abs() <= threshold {
        Err(Error::IllPosed { mean_inv: m, threshold })
    } else {
        Ok(m)
    }
}

fn slab_values_on_grid(alpha: &LaminateProfile, n: usize) -> Result<Vec<f64>> {
    let slabs = alpha.slab_count();
    if !n.is_multiple_of(slabs) {
        return Err(Error::MisalignedGrid { cells: n, slabs });
    }
    let per = n / slabs;
    Ok((0..n).map(|i| alpha.values()[i / per]).collect())
}

/// Solves `αφ − 𝔪(αφ) = ψ` for mean-zero `ψ` through
/// `φ = α⁻¹ψ − α⁻¹ 𝔪(α⁻¹ψ)/𝔪(α⁻¹)`.
pub fn solve_projected_1d(
    alpha: &LaminateProfile,
    psi: &GridFunction,
    tol: &Tolerances,
) -> Result<GridFunction> {
    let m_inv = require_nondegenerate(alpha, tol)?;
    let a = slab_values_on_grid(alpha, psi.n())?;
    let psi_mean = psi.mean();
    if psi_mean.abs() > 1e-12 * psi.max_abs().max(f64::MIN_POSITIVE) {
        return Err(Error::ContractViolation(format!(
            "ψ must have zero mean, got 𝔪(ψ) = {psi_mean:e}"
        )));
    }
    let inv_psi: Vec<f64> = a.iter().zip(psi.samples()).map(|(a, p)| p / a).collect();
    let correction = inv_psi.iter().sum::<f64>() / psi.n() as f64 / m_inv;
    let phi = inv_psi
        .iter()
        .zip(&a)
        .map(|(ip, a)| ip - correction / a)
        .collect();
    GridFunction::new(phi)
}

/// `max_i |αφ − 𝔪(αφ) − ψ|` on the grid.
pub fn projected_residual(
    alpha: &LaminateProfile,
    phi: &GridFunction,
    psi: &GridFunction,
) -> Result<f64> {
    if phi.n() != psi.n() {
        return Err(Error::InvalidInput("φ and ψ live on different grids".into()));
    }
    let a = slab_values_on_grid(alpha, phi.n())?;
    let a_phi: Vec<f64> = a.iter().zip(phi.samples()).map(|(a, p)| a * p).collect();
    let m = a_phi.iter().sum::<f64>() / a_phi.len() as f64;
    Ok(a_phi
        .iter()
        .zip(psi.samples())
        .map(|(ap, p)| (ap - m - p).abs())
        .fold(0.0, f64::max))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SpectrumReport1D {
    /// Distinct coefficient values, ascending.
    pub value_points: Vec<f64>,
    /// Roots of `Σ_j 1/(α_j − λ) = 0`, ascending by real part.
    pub mean_zero_roots: Vec<Complex64>,
    pub tolerance: f64,
}

/// Distinct values with multiplicities, ascending.
pub(crate) fn collapse_values(values: &[f64]) -> Vec<(f64, f64)> {
    let mut sorted = values.to_vec();
    sorted.sort_by(f64::total_cmp);
    let mut out: Vec<(f64, f64)> = Vec::new();
    for v in sorted {
        match out.last_mut() {
            Some((u, w)) if (v - *u).abs() <= 1e-14 * u.abs().max(1.0) => *w += 1.0,
            _ => out.push((v, 1.0)),
        }
    }
    out
}

/// Roots of `Σ_j 1/(α_j − λ)`, excluding the poles, each certified by
/// re-evaluating `𝔪((α − λ)⁻¹)`.
pub fn mean_zero_roots(alpha: &LaminateProfile, tol: &Tolerances) -> Vec<Complex64> {
    let groups = collapse_values(alpha.values());
    // Σ_v w_v ∏_{u≠v} (u − λ)
    let cleared = groups.iter().enumerate().fold(Poly::zero(), |acc, (i, &(_, w))| {
        let term = groups
            .iter()
            .enumerate()
            .filter(|&(k, _)| k != i)
            .fold(Poly::constant(w), |p, (_, &(u, _))| p * Poly::linear(u, -1.0));
        acc + term
    });
    let g = |z: Complex64| {
        groups.iter().fold(
            (Complex64::new(0.0, 0.0), Complex64::new(0.0, 0.0)),
            |(f, df), &(v, w)| {
                let inv = (Complex64::new(v, 0.0) - z).inv();
                (f + w * inv, df + w * inv * inv)
            },
        )
    };
    let mut roots: Vec<Complex64> = cleared
        .complex_roots()
        .into_iter()
        .map(|mut z| {
            for _ in 0..3 {
                let (f, df) = g(z);
                if df.norm() == 0.0 || !f.is_finite() {
                    break;
                }
                let cand = z - f / df;
                if cand.is_finite() && g(cand).0.norm() < f.norm() {
                    z = cand;
                } else {
                    break;
                }
            }
            if z.im.abs() <= 1e-12 * z.norm().max(1.0) {
                z.im = 0.0;
            }
            z
        })
        .filter(|&z| match mean_resolvent(alpha, z) {
            Ok(m) => m.norm() <= tol.root_residual * mean_abs_resolvent(alpha, z).max(1.0),
            Err(_) => false,
        })
        .collect();
    roots.sort_by(|a, b| a.re.total_cmp(&b.re).then(a.im.total_cmp(&b.im)));
    roots
}

pub fn inner_spectrum_1d(alpha: &LaminateProfile, tol: &Tolerances) -> SpectrumReport1D {
    SpectrumReport1D {
        value_points: collapse_values(alpha.values()).into_iter().map(|(v, _)| v).collect(),
        mean_zero_roots: mean_zero_roots(alpha, tol),
        tolerance: tol.root_residual,
    }
}

/// G-limit of `α(n·)` on `(0,1)`: the scalar `1/𝔪(α⁻¹)`, or the degenerate
/// relation `{0} × L₂` (empty inner spectrum) when `𝔪(α⁻¹) = 0`.
pub fn g_limit_1d(alpha: &LaminateProfile, tol: &Tolerances) -> HomogenisedLimit {
    match require_nondegenerate(alpha, tol) {
        Ok(m) => HomogenisedLimit::Scalar1D { coefficient: 1.0 / m },
        Err(_) => HomogenisedLimit::DegenerateA { dim: 1 },
    }
}
