//! Dense real polynomials: coefficient arithmetic, companion-matrix roots and
//! Sturm-sequence real-root isolation.

use std::ops::{Add, Mul, Neg, Sub};

use nalgebra::{DMatrix, Schur};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

/// Real polynomial with ascending coefficients, `coeffs[k]` multiplying `x^k`.
#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
pub struct Poly {
    coeffs: Vec<f64>,
}

impl Poly {
    pub fn new(mut coeffs: Vec<f64>) -> Self {
        while coeffs.last() == Some(&0.0) {
            coeffs.pop();
        }
        Poly { coeffs }
    }

    pub fn zero() -> Self {
        Poly { coeffs: Vec::new() }
    }

    pub fn constant(c: f64) -> Self {
        Poly::new(vec![c])
    }

    /// `a + b x`
    pub fn linear(a: f64, b: f64) -> Self {
        Poly::new(vec![a, b])
    }

    pub fn coeffs(&self) -> &[f64] {
        &self.coeffs
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn degree(&self) -> Option<usize> {
        self.coeffs.len().checked_sub(1)
    }

    pub fn max_abs_coeff(&self) -> f64 {
        self.coeffs.iter().fold(0.0, |m, c| m.max(c.abs()))
    }

    pub fn eval(&self, x: f64) -> f64 {
        self.coeffs.iter().rev().fold(0.0, |acc, &c| acc * x + c)
    }

    pub fn eval_complex(&self, z: Complex64) -> Complex64 {
        self.coeffs
            .iter()
            .rev()
            .fold(Complex64::new(0.0, 0.0), |acc, &c| acc * z + c)
    }

    pub fn derivative(&self) -> Poly {
        Poly::new(
            self.coeffs
                .iter()
                .enumerate()
                .skip(1)
                .map(|(k, c)| k as f64 * c)
                .collect(),
        )
    }

    pub fn scale(&self, factor: f64) -> Poly {
        Poly::new(self.coeffs.iter().map(|c| c * factor).collect())
    }

    /// Polynomial whose coefficients are the absolute values of `self`'s.
    pub fn abs_coeffs(&self) -> Poly {
        Poly::new(self.coeffs.iter().map(|c| c.abs()).collect())
    }

    /// Zeroes every coefficient with `|c| <= rel_tol * reference` and drops
    /// the resulting leading zeros.
    pub fn trimmed(&self, rel_tol: f64, reference: f64) -> Poly {
        let cut = rel_tol * reference;
        Poly::new(
            self.coeffs
                .iter()
                .map(|&c| if c.abs() <= cut { 0.0 } else { c })
                .collect(),
        )
    }

    /// Quotient and remainder of Euclidean division by `divisor`.
    pub fn div_rem(&self, divisor: &Poly) -> (Poly, Poly) {
        let dd = divisor
            .degree()
            .expect("division by the zero polynomial");
        let lead = divisor.coeffs[dd];
        let mut rem = self.coeffs.clone();
        if rem.len() <= dd {
            return (Poly::zero(), self.clone());
        }
        let mut quot = vec![0.0; rem.len() - dd];
        for k in (0..quot.len()).rev() {
            let q = rem[k + dd] / lead;
            quot[k] = q;
            for (i, &dc) in divisor.coeffs.iter().enumerate() {
                rem[k + i] -= q * dc;
            }
            rem[k + dd] = 0.0;
        }
        rem.truncate(dd);
        (Poly::new(quot), Poly::new(rem))
    }

    /// All complex roots, from the eigenvalues of the companion matrix (or a
    /// Weierstrass iteration if those fail to converge),
    /// followed by two Newton steps each.
    pub fn complex_roots(&self) -> Vec<Complex64> {
        let n = match self.degree() {
            None | Some(0) => return Vec::new(),
            Some(n) => n,
        };
        let lead = self.coeffs[n];
        if n == 1 {
            return vec![Complex64::new(-self.coeffs[0] / lead, 0.0)];
        }
        let companion = DMatrix::from_fn(n, n, |i, j| {
            if j == n - 1 {
                -self.coeffs[i] / lead
            } else if i == j + 1 {
                1.0
            } else {
                0.0
            }
        });
        let dp = self.derivative();
        let initial: Vec<Complex64> = match Schur::try_new(companion, f64::EPSILON, 100 * n) {
            Some(schur) => schur.complex_eigenvalues().iter().copied().collect(),
            None => self.weierstrass_roots(),
        };
        initial
            .iter()
            .map(|&z| {
                let mut z = z;
                for _ in 0..2 {
                    let d = dp.eval_complex(z);
                    if d.norm() == 0.0 {
                        break;
                    }
                    let step = self.eval_complex(z) / d;
                    let cand = z - step;
                    if cand.is_finite() && self.eval_complex(cand).norm() < self.eval_complex(z).norm()
                    {
                        z = cand;
                    } else {
                        break;
                    }
                }
                z
            })
            .collect()
    }

    /// Simultaneous Weierstrass iteration; fallback when the companion
    /// QR iteration stalls.
    fn weierstrass_roots(&self) -> Vec<Complex64> {
        let n = self.degree().unwrap_or(0);
        let lead = self.coeffs[n];
        let radius = 1.0
            + self.coeffs[..n]
                .iter()
                .fold(0.0f64, |m, c| m.max((c / lead).abs()));
        let seed = Complex64::from_polar(0.4 * radius.min(1e150), 0.9);
        let mut z: Vec<Complex64> = (0..n).map(|i| seed.powu(i as u32 + 1)).collect();
        for _ in 0..2000 {
            let mut moved = 0.0f64;
            for i in 0..n {
                let den = (0..n)
                    .filter(|&j| j != i)
                    .fold(Complex64::new(lead, 0.0), |acc, j| acc * (z[i] - z[j]));
                if den.norm() == 0.0 {
                    continue;
                }
                let step = self.eval_complex(z[i]) / den;
                if step.is_finite() {
                    z[i] -= step;
                    moved = moved.max(step.norm() / z[i].norm().max(1.0));
                }
            }
            if moved < 1e-15 {
                break;
            }
        }
        z
    }

    /// Sturm chain `p, p', -rem(p, p'), ...`, each member normalised to unit
    /// max-coefficient. Remainder coefficients below `rel_tol` of the dividend
    /// size are treated as zero.
    pub fn sturm_sequence(&self, rel_tol: f64) -> Vec<Poly> {
        let mut chain = Vec::new();
        if self.is_zero() {
            return chain;
        }
        let normalise = |p: Poly| {
            let m = p.max_abs_coeff();
            if m > 0.0 {
                p.scale(1.0 / m)
            } else {
                p
            }
        };
        chain.push(normalise(self.clone()));
        let d = self.derivative();
        if d.is_zero() {
            return chain;
        }
        chain.push(normalise(d));
        loop {
            let n = chain.len();
            let (_, rem) = chain[n - 2].div_rem(&chain[n - 1]);
            let rem = rem.trimmed(rel_tol, 1.0);
            if rem.is_zero() {
                break;
            }
            chain.push(normalise(-rem));
            if chain.last().and_then(Poly::degree) == Some(0) {
                break;
            }
        }
        chain
    }

    /// Distinct real roots in the closed interval `[lo, hi]`, isolated with a
    /// Sturm chain and refined to near machine precision.
    pub fn real_roots_in(&self, lo: f64, hi: f64, rel_tol: f64) -> Vec<f64> {
        assert!(lo < hi, "empty interval");
        if self.is_zero() {
            return Vec::new();
        }
        let chain = self.sturm_sequence(rel_tol);
        let mut roots = Vec::new();
        if self.eval(lo) == 0.0 {
            roots.push(lo);
        }
        let mut stack = vec![(lo, hi)];
        let min_width = 4.0 * f64::EPSILON * lo.abs().max(hi.abs()).max(1.0);
        while let Some((a, b)) = stack.pop() {
            let count = sturm_count(&chain, a, b);
            if count == 0 {
                continue;
            }
            if count == 1 || b - a < min_width {
                roots.push(self.refine_isolated(&chain, a, b));
                continue;
            }
            let mut mid = 0.5 * (a + b);
            if self.eval(mid) == 0.0 {
                roots.push(mid);
                mid += 0.25 * (b - mid).min(mid - a).max(min_width);
                if mid >= b {
                    continue;
                }
            }
            stack.push((mid, b));
            stack.push((a, mid));
        }
        roots.sort_by(f64::total_cmp);
        roots.dedup_by(|x, y| (*x - *y).abs() <= min_width);
        roots
    }

    fn refine_isolated(&self, chain: &[Poly], mut a: f64, mut b: f64) -> f64 {
        let (fa, fb) = (self.eval(a), self.eval(b));
        if fb == 0.0 {
            return b;
        }
        if fa.signum() != fb.signum() {
            let mut fa = fa;
            for _ in 0..200 {
                let mid = 0.5 * (a + b);
                if mid <= a || mid >= b {
                    break;
                }
                let fm = self.eval(mid);
                if fm == 0.0 {
                    return mid;
                }
                if fm.signum() == fa.signum() {
                    a = mid;
                    fa = fm;
                } else {
                    b = mid;
                }
            }
        } else {
            // even multiplicity: no sign change, bisect on the Sturm count
            for _ in 0..200 {
                let mid = 0.5 * (a + b);
                if mid <= a || mid >= b {
                    break;
                }
                if sturm_count(chain, a, mid) > 0 {
                    b = mid;
                } else {
                    a = mid;
                }
            }
        }
        let mut x = 0.5 * (a + b);
        let dp = self.derivative();
        for _ in 0..3 {
            let d = dp.eval(x);
            if d == 0.0 {
                break;
            }
            let cand = x - self.eval(x) / d;
            if cand.is_finite() && self.eval(cand).abs() < self.eval(x).abs() {
                x = cand;
            } else {
                break;
            }
        }
        x
    }
}

/// Number of distinct real roots in `(a, b]`.
pub fn sturm_count(chain: &[Poly], a: f64, b: f64) -> usize {
    sign_variations(chain, a).saturating_sub(sign_variations(chain, b))
}

fn sign_variations(chain: &[Poly], x: f64) -> usize {
    let mut count = 0;
    let mut last = 0.0_f64;
    for p in chain {
        let v = p.eval(x);
        if v == 0.0 {
            continue;
        }
        if last != 0.0 && v.signum() != last.signum() {
            count += 1;
        }
        last = v;
    }
    count
}

impl Add for Poly {
    type Output = Poly;
    fn add(self, rhs: Poly) -> Poly {
        let n = self.coeffs.len().max(rhs.coeffs.len());
        let get = |p: &Poly, k: usize| p.coeffs.get(k).copied().unwrap_or(0.0);
        Poly::new((0..n).map(|k| get(&self, k) + get(&rhs, k)).collect())
    }
}

impl Sub for Poly {
    type Output = Poly;
    fn sub(self, rhs: Poly) -> Poly {
        self + (-rhs)
    }
}

impl Neg for Poly {
    type Output = Poly;
    fn neg(self) -> Poly {
        Poly::new(self.coeffs.into_iter().map(|c| -c).collect())
    }
}

impl Mul for Poly {
    type Output = Poly;
    fn mul(self, rhs: Poly) -> Poly {
        if self.is_zero() || rhs.is_zero() {
            return Poly::zero();
        }
        let mut out = vec![0.0; self.coeffs.len() + rhs.coeffs.len() - 1];
        for (i, a) in self.coeffs.iter().enumerate() {
            for (j, b) in rhs.coeffs.iter().enumerate() {
                out[i + j] += a * b;
            }
        }
        Poly::new(out)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn from_roots(roots: &[f64]) -> Poly {
        roots
            .iter()
            .fold(Poly::constant(1.0), |p, &r| p * Poly::linear(-r, 1.0))
    }

    #[test]
    fn companion_roots_of_cubic() {
        let p = from_roots(&[1.0, -2.0, 3.0]);
        let mut re: Vec<f64> = p.complex_roots().iter().map(|z| z.re).collect();
        re.sort_by(f64::total_cmp);
        for (got, want) in re.iter().zip([-2.0, 1.0, 3.0]) {
            assert!((got - want).abs() < 1e-12);
        }
    }

    #[test]
    fn complex_pair() {
        // x² + 1
        let p = Poly::new(vec![1.0, 0.0, 1.0]);
        let roots = p.complex_roots();
        assert_eq!(roots.len(), 2);
        for z in roots {
            assert!(z.re.abs() < 1e-14);
            assert!((z.im.abs() - 1.0).abs() < 1e-14);
        }
    }

    #[test]
    fn sturm_isolation_in_interval() {
        let p = from_roots(&[0.1, 0.2, 0.7, 1.5]);
        let roots = p.real_roots_in(0.15, 1.0, 1e-12);
        assert_eq!(roots.len(), 2);
        assert!((roots[0] - 0.2).abs() < 1e-13);
        assert!((roots[1] - 0.7).abs() < 1e-13);
    }

    #[test]
    fn double_root_found_without_sign_change() {
        let p = from_roots(&[0.5, 0.5, -3.0]);
        let roots = p.real_roots_in(0.0, 1.0, 1e-12);
        assert_eq!(roots.len(), 1);
        assert!((roots[0] - 0.5).abs() < 1e-7);
    }

    #[test]
    fn root_at_endpoint() {
        let p = from_roots(&[1.0, 3.0]);
        let roots = p.real_roots_in(0.0, 1.0, 1e-12);
        assert_eq!(roots, vec![1.0]);
        let roots = p.real_roots_in(1.0, 2.0, 1e-12);
        assert_eq!(roots, vec![1.0]);
    }

    #[test]
    fn weierstrass_fallback_finds_roots() {
        // (x − 1)(x + 2)(x − 0.5)(x² + 1)
        let p = Poly::linear(-1.0, 1.0)
            * Poly::linear(2.0, 1.0)
            * Poly::linear(-0.5, 1.0)
            * Poly::new(vec![1.0, 0.0, 1.0]);
        let roots = p.weierstrass_roots();
        for want in [
            Complex64::new(1.0, 0.0),
            Complex64::new(-2.0, 0.0),
            Complex64::new(0.5, 0.0),
            Complex64::new(0.0, 1.0),
            Complex64::new(0.0, -1.0),
        ] {
            assert!(roots.iter().any(|z| (z - want).norm() < 1e-10), "{want} missing");
        }
    }

    #[test]
    fn division_identity() {
        let a = Poly::new(vec![3.0, -1.0, 0.5, 2.0, 1.0]);
        let b = Poly::new(vec![1.0, 2.0, -1.0]);
        let (q, r) = a.div_rem(&b);
        let back = q * b + r;
        for (x, y) in back.coeffs().iter().zip(a.coeffs()) {
            assert!((x - y).abs() < 1e-12);
        }
    }
}
