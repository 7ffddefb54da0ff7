//! Finite sections of the compression of a coefficient to the gradient
//! fields of `H₀¹((0,1)^d)`, in the normalised basis `∇e_k/‖∇e_k‖` with
//! `e_k = ∏_m √2 sin(k_m π x_m)`, `k ∈ {1..M}^d`.
//!
//! Both supported coefficients depend on `x₁` only (or are constant), so the
//! matrix is block-diagonal in the transverse index `(k₂, …, k_d)`; each
//! block is an `M × M` matrix in `k₁`.

use std::f64::consts::PI;

use nalgebra::{DMatrix, SymmetricEigen};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::homogenisation::modes;
use crate::laminate::LaminateProfile;

pub const MAX_MODES: u32 = 40;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum GalerkinCoefficient {
    /// Scalar laminate `α(x₁)`.
    Laminate { alpha: LaminateProfile },
    /// `Γ = diag(γ, 1, …, 1)`.
    Gamma { gamma: f64 },
}

#[derive(Debug, Clone, PartialEq)]
pub struct GalerkinBlock {
    /// `(k₂, …, k_d)`.
    pub transverse: Vec<u32>,
    pub matrix: DMatrix<f64>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct GalerkinProjection {
    pub dim: usize,
    pub modes: u32,
    pub blocks: Vec<GalerkinBlock>,
}

/// `∫_a^b cos(nπx) dx`.
fn cos_integral(n: i64, a: f64, b: f64) -> f64 {
    if n == 0 {
        b - a
    } else {
        let w = n as f64 * PI;
        ((w * b).sin() - (w * a).sin()) / w
    }
}

/// `(2∫α cos(kπx)cos(lπx), 2∫α sin(kπx)sin(lπx))` over `(0,1)`.
fn laminate_moments(alpha: &LaminateProfile, k: u32, l: u32) -> (f64, f64) {
    let h = alpha.width();
    let (k, l) = (i64::from(k), i64::from(l));
    alpha
        .values()
        .iter()
        .enumerate()
        .fold((0.0, 0.0), |(c, s), (j, &a)| {
            let (lo, hi) = (j as f64 * h, (j + 1) as f64 * h);
            let diff = cos_integral(k - l, lo, hi);
            let sum = cos_integral(k + l, lo, hi);
            (c + a * (diff + sum), s + a * (diff - sum))
        })
}

pub fn assemble_galerkin(coef: &GalerkinCoefficient, dim: usize, modes_per_axis: u32) -> Result<GalerkinProjection> {
    if !(2..=3).contains(&dim) {
        return Err(Error::InvalidInput(format!("dimension must be 2 or 3, got {dim}")));
    }
    if modes_per_axis == 0 || modes_per_axis > MAX_MODES {
        return Err(Error::InvalidInput(format!(
            "modes per axis must lie in 1..={MAX_MODES}, got {modes_per_axis}"
        )));
    }
    if let GalerkinCoefficient::Gamma { gamma } = coef {
        if !gamma.is_finite() {
            return Err(Error::NonFinite("γ".into()));
        }
    }
    let m = modes_per_axis as usize;
    let blocks = modes(dim - 1, modes_per_axis)
        .into_iter()
        .map(|transverse| {
            let kt: f64 = transverse.iter().map(|&v| f64::from(v).powi(2)).sum();
            let matrix = DMatrix::from_fn(m, m, |i, j| {
                let (k1, l1) = (i as u32 + 1, j as u32 + 1);
                let (kf, lf) = (f64::from(k1), f64::from(l1));
                let norm = ((kf * kf + kt) * (lf * lf + kt)).sqrt();
                match coef {
                    GalerkinCoefficient::Laminate { alpha } => {
                        let (c, s) = laminate_moments(alpha, k1, l1);
                        (kf * lf * c + kt * s) / norm
                    }
                    GalerkinCoefficient::Gamma { gamma } => {
                        if i == j {
                            (gamma * kf * kf + kt) / (kf * kf + kt)
                        } else {
                            0.0
                        }
                    }
                }
            });
            GalerkinBlock { transverse, matrix }
        })
        .collect();
    Ok(GalerkinProjection { dim, modes: modes_per_axis, blocks })
}

impl GalerkinProjection {
    pub fn size(&self) -> usize {
        (self.modes as usize).pow(self.dim as u32)
    }

    /// `max |G_ij − G_ji|` over all blocks.
    pub fn asymmetry(&self) -> f64 {
        self.blocks
            .iter()
            .map(|b| (&b.matrix - b.matrix.transpose()).amax())
            .fold(0.0, f64::max)
    }

    /// Global index of mode `k`: `k₁` varies fastest.
    pub fn index_of(&self, k: &[u32]) -> usize {
        let m = self.modes as usize;
        k.iter()
            .rev()
            .fold(0, |acc, &v| acc * m + (v as usize - 1))
    }

    /// Full matrix in the global ordering of [`index_of`](Self::index_of).
    pub fn dense(&self) -> DMatrix<f64> {
        let n = self.size();
        let m = self.modes as usize;
        let mut out = DMatrix::zeros(n, n);
        for (b, block) in self.blocks.iter().enumerate() {
            let offset = self.block_offset(&block.transverse, b);
            out.view_mut((offset, offset), (m, m)).copy_from(&block.matrix);
        }
        out
    }

    fn block_offset(&self, transverse: &[u32], _position: usize) -> usize {
        let mut k = vec![1];
        k.extend_from_slice(transverse);
        self.index_of(&k)
    }

    /// Nonzero entries `(i, j, value)` in the global ordering.
    pub fn triplets(&self) -> Vec<(usize, usize, f64)> {
        let m = self.modes as usize;
        let mut out = Vec::new();
        for (b, block) in self.blocks.iter().enumerate() {
            let offset = self.block_offset(&block.transverse, b);
            for i in 0..m {
                for j in 0..m {
                    let v = block.matrix[(i, j)];
                    if v != 0.0 {
                        out.push((offset + i, offset + j, v));
                    }
                }
            }
        }
        out.sort_by_key(|&(i, j, _)| (i, j));
        out
    }
}

/// All eigenvalues, ascending.
pub fn galerkin_spectrum(g: &GalerkinProjection) -> Vec<f64> {
    let mut eigs: Vec<f64> = g
        .blocks
        .iter()
        .flat_map(|b| {
            let sym = 0.5 * (&b.matrix + b.matrix.transpose());
            SymmetricEigen::new(sym).eigenvalues.iter().copied().collect::<Vec<_>>()
        })
        .collect();
    eigs.sort_by(f64::total_cmp);
    eigs
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct StabilityTag {
    pub value: f64,
    /// Distance to the nearest eigenvalue of the section with 5 more modes.
    pub drift: f64,
    /// `drift ≤ window`; a heuristic guard against spectral pollution.
    pub stable: bool,
}

/// Tags each eigenvalue at `M` modes by its drift under `M → M + 5`.
pub fn stability_filter(
    coef: &GalerkinCoefficient,
    dim: usize,
    modes_per_axis: u32,
    window: f64,
) -> Result<Vec<StabilityTag>> {
    let a = galerkin_spectrum(&assemble_galerkin(coef, dim, modes_per_axis)?);
    let b = galerkin_spectrum(&assemble_galerkin(coef, dim, (modes_per_axis + 5).min(MAX_MODES))?);
    Ok(a
        .into_iter()
        .map(|value| {
            let drift = nearest_distance(&b, value);
            StabilityTag { value, drift, stable: drift <= window }
        })
        .collect())
}

/// Distance from `x` to the nearest element of the sorted slice `sorted`.
pub fn nearest_distance(sorted: &[f64], x: f64) -> f64 {
    let i = sorted.partition_point(|&v| v < x);
    let mut best = f64::INFINITY;
    if i < sorted.len() {
        best = best.min((sorted[i] - x).abs());
    }
    if i > 0 {
        best = best.min((sorted[i - 1] - x).abs());
    }
    best
}

#[cfg(test)]
mod tests {
    use super::*;

    fn lam(v: &[f64]) -> GalerkinCoefficient {
        GalerkinCoefficient::Laminate { alpha: LaminateProfile::new(v.to_vec()).unwrap() }
    }

    #[test]
    fn unit_coefficient_is_identity() {
        for dim in [2, 3] {
            let g = assemble_galerkin(&lam(&[1.0]), dim, 6).unwrap();
            let d = g.dense();
            let err = (&d - DMatrix::identity(d.nrows(), d.ncols())).amax();
            assert!(err < 1e-14, "{err}");
        }
    }

    #[test]
    fn constant_coefficient_spectrum() {
        let e = galerkin_spectrum(&assemble_galerkin(&lam(&[2.5, 2.5]), 2, 10).unwrap());
        assert!(e.iter().all(|v| (v - 2.5).abs() < 1e-12));
    }

    #[test]
    fn gamma_is_diagonal() {
        let g = assemble_galerkin(&GalerkinCoefficient::Gamma { gamma: 2.0 }, 2, 30).unwrap();
        let e = galerkin_spectrum(&g);
        let mut want: Vec<f64> = modes(2, 30)
            .iter()
            .map(|k| {
                let (a, b) = (f64::from(k[0]).powi(2), f64::from(k[1]).powi(2));
                (2.0 * a + b) / (a + b)
            })
            .collect();
        want.sort_by(f64::total_cmp);
        for (x, y) in e.iter().zip(&want) {
            assert!((x - y).abs() < 1e-12);
        }
    }

    #[test]
    fn laminate_is_symmetric() {
        let g = assemble_galerkin(&lam(&[1.0, -2.0, 0.5, 3.0]), 3, 8).unwrap();
        assert!(g.asymmetry() < 1e-13);
        assert_eq!(g.blocks.len(), 64);
    }

    #[test]
    fn moments_match_quadrature() {
        let a = LaminateProfile::new(vec![1.0, -2.0, 0.5]).unwrap();
        for (k, l) in [(1, 1), (2, 5), (3, 3), (7, 2)] {
            let (c, s) = laminate_moments(&a, k, l);
            let n = 30000;
            let (mut qc, mut qs) = (0.0, 0.0);
            for i in 0..n {
                let x = (i as f64 + 0.5) / n as f64;
                let (ck, cl) = ((k as f64 * PI * x).cos(), (l as f64 * PI * x).cos());
                let (sk, sl) = ((k as f64 * PI * x).sin(), (l as f64 * PI * x).sin());
                qc += 2.0 * a.at(x) * ck * cl / n as f64;
                qs += 2.0 * a.at(x) * sk * sl / n as f64;
            }
            assert!((c - qc).abs() < 1e-6 && (s - qs).abs() < 1e-6);
        }
    }

    #[test]
    fn laminate_spectrum_clusters_at_values() {
        let e = galerkin_spectrum(&assemble_galerkin(&lam(&[1.0, -1.0, 1.0]), 2, 20).unwrap());
        assert!(nearest_distance(&e, 1.0) < 0.05);
        assert!(nearest_distance(&e, -1.0) < 0.05);
        assert!(e.iter().all(|&v| (-1.0 - 1e-12..=1.0 + 1e-12).contains(&v)));
    }

    #[test]
    fn dense_and_triplets_agree() {
        let g = assemble_galerkin(&lam(&[1.0, 3.0]), 2, 4).unwrap();
        let d = g.dense();
        let t = g.triplets();
        for &(i, j, v) in &t {
            assert_eq!(d[(i, j)], v);
        }
        let nnz = d.iter().filter(|v| **v != 0.0).count();
        assert_eq!(nnz, t.len());
        assert_eq!(g.index_of(&[1, 1]), 0);
        assert_eq!(g.index_of(&[2, 1]), 1);
        assert_eq!(g.index_of(&[1, 2]), 4);
    }

    #[test]
    fn stability_of_exact_section() {
        let tags = stability_filter(&GalerkinCoefficient::Gamma { gamma: 4.0 }, 2, 10, 1e-12).unwrap();
        assert!(tags.iter().all(|t| t.stable));
    }

    #[test]
    fn input_validation() {
        assert!(assemble_galerkin(&lam(&[1.0]), 1, 4).is_err());
        assert!(assemble_galerkin(&lam(&[1.0]), 2, 41).is_err());
        assert!(assemble_galerkin(&lam(&[1.0]), 2, 0).is_err());
    }
}
