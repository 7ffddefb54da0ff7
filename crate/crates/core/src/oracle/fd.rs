//! Flux-form finite differences for `−(αu′)′ + βu` on `(0,1)` with Dirichlet
//! conditions. `α` and `β` are sampled at cell midpoints of a slab-aligned
//! grid, so every interface sits on a node.

use serde::{Deserialize, Serialize};

use crate::error::{ensure_finite, Error, Result};
use crate::laminate::LaminateProfile;

/// Symmetric tridiagonal operator on the `N − 1` interior nodes `i/N`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FDOperator1D {
    cells: usize,
    diag: Vec<f64>,
    off: Vec<f64>,
}

/// Row `i` (node `(i+1)/N`) reads
/// `(α_{i−½} + α_{i+½})/Δx² + (β_{i−½} + β_{i+½})/2` on the diagonal and
/// `−α_{i+½}/Δx²` towards node `i+1`.
pub fn assemble_fd_1d(alpha: &LaminateProfile, beta: &[f64], cells: usize) -> Result<FDOperator1D> {
    let slabs = alpha.slab_count();
    if beta.len() != slabs {
        return Err(Error::InvalidInput(format!(
            "β has {} entries but the profile has {slabs} slabs",
            beta.len()
        )));
    }
    ensure_finite("β", beta)?;
    if !cells.is_multiple_of(slabs) || cells < 2 * slabs {
        return Err(Error::MisalignedGrid { cells, slabs });
    }
    let per = cells / slabs;
    let dx2 = (1.0 / cells as f64).powi(2);
    let a = |c: usize| alpha.values()[c / per];
    let b = |c: usize| beta[c / per];
    let nodes = cells - 1;
    let diag = (0..nodes)
        .map(|i| (a(i) + a(i + 1)) / dx2 + 0.5 * (b(i) + b(i + 1)))
        .collect();
    let off = (0..nodes - 1).map(|i| -a(i + 1) / dx2).collect();
    Ok(FDOperator1D { cells, diag, off })
}

impl FDOperator1D {
    pub fn cells(&self) -> usize {
        self.cells
    }

    /// Number of unknowns, `N − 1`.
    pub fn dim(&self) -> usize {
        self.diag.len()
    }

    pub fn diag(&self) -> &[f64] {
        &self.diag
    }

    pub fn off(&self) -> &[f64] {
        &self.off
    }

    /// Interior node coordinates.
    pub fn nodes(&self) -> Vec<f64> {
        (1..self.cells).map(|i| i as f64 / self.cells as f64).collect()
    }

    /// `self + shift · diag(w)`.
    pub fn with_diagonal_shift(&self, shift: f64, weights: &[f64]) -> Result<FDOperator1D> {
        if weights.len() != self.dim() {
            return Err(Error::InvalidInput("weight length must match the operator".into()));
        }
        let diag = self.diag.iter().zip(weights).map(|(d, w)| d + shift * w).collect();
        Ok(FDOperator1D { cells: self.cells, diag, off: self.off.clone() })
    }

    pub fn apply(&self, u: &[f64]) -> Vec<f64> {
        let n = self.dim();
        (0..n)
            .map(|i| {
                let mut v = self.diag[i] * u[i];
                if i > 0 {
                    v += self.off[i - 1] * u[i - 1];
                }
                if i + 1 < n {
                    v += self.off[i] * u[i + 1];
                }
                v
            })
            .collect()
    }

    /// Gaussian elimination with partial pivoting; the operator may be
    /// indefinite, so no factorisation without pivoting is attempted.
    pub fn solve(&self, rhs: &[f64]) -> Result<Vec<f64>> {
        let n = self.dim();
        if rhs.len() != n {
            return Err(Error::InvalidInput("right-hand side length must match the operator".into()));
        }
        // rows hold (d, u1, u2): diagonal and the two superdiagonals after pivoting
        let mut d = self.diag.clone();
        let mut u1: Vec<f64> = self.off.iter().copied().chain([0.0]).collect();
        let mut u2 = vec![0.0; n];
        let mut l: Vec<f64> = self.off.clone();
        let mut b = rhs.to_vec();
        let scale = self.norm_inf();
        for i in 0..n.saturating_sub(1) {
            if l[i].abs() > d[i].abs() {
                // swap rows i and i+1
                let (di, u1i, u2i, bi) = (d[i], u1[i], u2[i], b[i]);
                d[i] = l[i];
                u1[i] = d[i + 1];
                u2[i] = u1[i + 1];
                b[i] = b[i + 1];
                l[i] = di;
                d[i + 1] = u1i;
                u1[i + 1] = u2i;
                b[i + 1] = bi;
            }
            if d[i] == 0.0 {
                return Err(Error::Singular(format!("zero pivot at row {i}")));
            }
            let f = l[i] / d[i];
            d[i + 1] -= f * u1[i];
            u1[i + 1] -= f * u2[i];
            b[i + 1] -= f * b[i];
        }
        if d[n - 1].abs() <= n as f64 * f64::EPSILON * scale {
            return Err(Error::Singular(format!("zero pivot at row {}", n - 1)));
        }
        let mut x = vec![0.0; n];
        for i in (0..n).rev() {
            let mut v = b[i];
            if i + 1 < n {
                v -= u1[i] * x[i + 1];
            }
            if i + 2 < n {
                v -= u2[i] * x[i + 2];
            }
            x[i] = v / d[i];
        }
        ensure_finite("solution", &x).map_err(|_| Error::Singular("solution overflowed".into()))?;
        Ok(x)
    }

    pub fn norm_inf(&self) -> f64 {
        let n = self.dim();
        (0..n)
            .map(|i| {
                let mut s = self.diag[i].abs();
                if i > 0 {
                    s += self.off[i - 1].abs();
                }
                if i + 1 < n {
                    s += self.off[i].abs();
                }
                s
            })
            .fold(0.0, f64::max)
    }

    /// Number of eigenvalues strictly below `x` (Sturm count of the
    /// `LDLᵀ` factorisation of `T − x`).
    pub fn count_below(&self, x: f64) -> usize {
        let tiny = f64::MIN_POSITIVE / f64::EPSILON;
        let mut count = 0;
        let mut q = 1.0;
        for i in 0..self.dim() {
            let e2 = if i == 0 { 0.0 } else { self.off[i - 1] * self.off[i - 1] };
            q = self.diag[i] - x - if i == 0 { 0.0 } else { e2 / q };
            if q == 0.0 {
                q = -tiny;
            }
            if q < 0.0 {
                count += 1;
            }
        }
        count
    }

    /// Gershgorin bounds.
    pub fn spectral_bounds(&self) -> (f64, f64) {
        let n = self.dim();
        (0..n).fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), i| {
            let mut r = 0.0;
            if i > 0 {
                r += self.off[i - 1].abs();
            }
            if i + 1 < n {
                r += self.off[i].abs();
            }
            (lo.min(self.diag[i] - r), hi.max(self.diag[i] + r))
        })
    }

    /// The `index`-th eigenvalue in ascending order, by bisection on the
    /// Sturm count down to `rel_tol` of the spectral bound.
    pub fn eigenvalue(&self, index: usize, rel_tol: f64) -> Result<f64> {
        if index >= self.dim() {
            return Err(Error::InvalidInput(format!("eigenvalue index {index} out of range")));
        }
        let (mut lo, mut hi) = self.spectral_bounds();
        let width = rel_tol * lo.abs().max(hi.abs()).max(f64::MIN_POSITIVE);
        let mut trace = Vec::new();
        for _ in 0..400 {
            if hi - lo <= width {
                return Ok(0.5 * (lo + hi));
            }
            let mid = 0.5 * (lo + hi);
            if mid <= lo || mid >= hi {
                return Ok(mid);
            }
            if self.count_below(mid) > index {
                hi = mid;
            } else {
                lo = mid;
            }
            trace.push((lo, hi));
        }
        Err(Error::NonConvergence { trace })
    }

    /// The `count` algebraically smallest eigenvalues, ascending.
    pub fn smallest_eigs(&self, count: usize, rel_tol: f64) -> Result<Vec<f64>> {
        (0..count.min(self.dim())).map(|i| self.eigenvalue(i, rel_tol)).collect()
    }

    /// Eigenvalues in `[lo, hi)`, ascending.
    pub fn eigs_in(&self, lo: f64, hi: f64, rel_tol: f64) -> Result<Vec<f64>> {
        (self.count_below(lo)..self.count_below(hi))
            .map(|i| self.eigenvalue(i, rel_tol))
            .collect()
    }

    /// `min |λ|` over the spectrum, which for a symmetric operator is the
    /// smallest singular value.
    pub fn min_singular_value(&self, rel_tol: f64) -> Result<f64> {
        let k = self.count_below(0.0);
        let mut best = f64::INFINITY;
        if k > 0 {
            best = best.min(self.eigenvalue(k - 1, rel_tol)?.abs());
        }
        if k < self.dim() {
            best = best.min(self.eigenvalue(k, rel_tol)?.abs());
        }
        Ok(best)
    }

    /// Stored entries `(i, j, value)`, zero-based, row-major.
    pub fn triplets(&self) -> Vec<(usize, usize, f64)> {
        let n = self.dim();
        let mut out = Vec::with_capacity(3 * n);
        for i in 0..n {
            if i > 0 {
                out.push((i, i - 1, self.off[i - 1]));
            }
            out.push((i, i, self.diag[i]));
            if i + 1 < n {
                out.push((i, i + 1, self.off[i]));
            }
        }
        out
    }

    /// Nodal weights `(w_{i−½} + w_{i+½})/2` for slab values `w`, matching the
    /// discretisation of a zero-order term.
    pub fn nodal_weights(&self, slab_values: &[f64]) -> Vec<f64> {
        let per = self.cells / slab_values.len();
        let w = |c: usize| slab_values[c / per];
        (0..self.dim()).map(|i| 0.5 * (w(i) + w(i + 1))).collect()
    }
}
