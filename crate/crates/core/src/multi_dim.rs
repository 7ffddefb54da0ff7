//! Well-posedness and the discrete part of the inner spectrum on
//! `Ω = (0,1) × Ω̂`, where the cross-section `Ω̂` enters only through the
//! Dirichlet eigenvalues `λ_k` of its Laplacian.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::error::{ensure_finite, Error, Result};
use crate::laminate::{chi, p_alpha_eval, p_alpha_poly, q_tilde_eval, transfer, LaminateProfile};
use crate::one_dim::{collapse_values, mean_zero_roots, require_nondegenerate};
use crate::poly::Poly;
use crate::tolerance::Tolerances;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum SequenceSource {
    /// Truncation of the (unbounded) Dirichlet spectrum of `(0,1)^dim`.
    DirichletBox { dim: usize, k_max: u32 },
    /// A finite user-supplied list.
    User,
}

/// Sorted distinct positive reals with a uniform gap.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DiscreteSequence {
    values: Vec<f64>,
    separation: f64,
    source: SequenceSource,
}

impl DiscreteSequence {
    pub fn user(mut values: Vec<f64>) -> Result<Self> {
        ensure_finite("λ", &values)?;
        if values.is_empty() {
            return Err(Error::InvalidInput("the sequence must be nonempty".into()));
        }
        values.sort_by(f64::total_cmp);
        values.dedup();
        Self::from_sorted(values, SequenceSource::User)
    }

    fn from_sorted(values: Vec<f64>, source: SequenceSource) -> Result<Self> {
        if values[0] <= 0.0 {
            return Err(Error::InvalidInput(format!(
                "sequence values must be positive, got {}",
                values[0]
            )));
        }
        // with a single value the gap is measured to 0
        let separation = values
            .windows(2)
            .map(|w| w[1] - w[0])
            .fold(values[0], f64::min);
        Ok(DiscreteSequence { values, separation, source })
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn separation(&self) -> f64 {
        self.separation
    }

    pub fn source(&self) -> SequenceSource {
        self.source
    }

    pub fn min(&self) -> f64 {
        self.values[0]
    }

    /// Whether the listed values truncate an unbounded sequence.
    pub fn is_truncation(&self) -> bool {
        matches!(self.source, SequenceSource::DirichletBox { .. })
    }
}

/// Distinct values of `π² Σ_m k_m²` over `k ∈ {1..k_max}^dim`.
pub fn dirichlet_eigenvalues(dim: usize, k_max: u32) -> Result<DiscreteSequence> {
    if dim == 0 || k_max == 0 {
        return Err(Error::InvalidInput("dim and k_max must be at least 1".into()));
    }
    let mut sums: Vec<u64> = vec![0];
    for _ in 0..dim {
        sums = sums
            .iter()
            .flat_map(|&s| (1..=u64::from(k_max)).map(move |k| s + k * k))
            .collect();
        sums.sort_unstable();
        sums.dedup();
    }
    let values = sums.into_iter().map(|s| PI * PI * s as f64).collect();
    DiscreteSequence::from_sorted(values, SequenceSource::DirichletBox { dim, k_max })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum KCutoffPolicy {
    /// Evaluate up to the certified cutoff and certify the rest through `χ(α)`.
    Auto,
    /// Evaluate every listed value.
    EvaluateAll,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Witness {
    pub k_index: usize,
    pub lambda: f64,
    pub d: f64,
    /// `μ_k q̃` at the witness, with `μ_k = √λ_k`.
    pub value: f64,
    pub magnitude: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "verdict", rename_all = "snake_case")]
pub enum Verdict {
    Satisfied,
    Violated { witness: Witness },
    Inconclusive { reason: String },
}

/// Certificate for the modes beyond the evaluation cutoff.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TailCertificate {
    pub chi: f64,
    /// Bound on `|p_α′|` over `[0,1]`.
    pub lipschitz: f64,
    /// For `μ ≥ mu_star`, `|μq̃(μ,…,μ) − χ(α)| ≤ |χ(α)|/4`.
    pub mu_star: f64,
}

impl TailCertificate {
    pub fn covers(&self, mu: f64) -> bool {
        mu >= self.mu_star
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct QCriterionResult {
    pub verdict: Verdict,
    /// Largest `δ` such that every grid value up to it passed at `±δ`.
    pub delta0: f64,
    pub k_checked: usize,
    pub k_certified: usize,
    pub tail: Option<TailCertificate>,
    /// Smallest `|μq̃| / magnitude` seen among evaluated pairs.
    pub min_relative: f64,
    /// `(k_index, d)` pairs skipped because some `λ_k + sgn(α_j)d ≤ 0`.
    pub skipped: Vec<(usize, f64)>,
    pub notes: Vec<String>,
}

impl QCriterionResult {
    pub fn satisfied(&self) -> bool {
        matches!(self.verdict, Verdict::Satisfied)
    }

    pub fn witness(&self) -> Option<&Witness> {
        match &self.verdict {
            Verdict::Violated { witness } => Some(witness),
            _ => None,
        }
    }
}

/// `|p_α′| ≤ Σ_k k|c_k|` on `[0,1]`.
fn p_alpha_lipschitz(alpha: &LaminateProfile) -> f64 {
    let (p, _) = p_alpha_poly(alpha);
    p.coeffs()
        .iter()
        .enumerate()
        .map(|(k, c)| k as f64 * c.abs())
        .sum()
}

/// `χ(α)` is treated as zero below `eps_p ∏ (1 + |α_j/α_{j+1}|)`.
pub fn chi_is_zero(alpha: &LaminateProfile, tol: &Tolerances) -> bool {
    let scale: f64 = alpha
        .values()
        .windows(2)
        .map(|w| 1.0 + (w[0] / w[1]).abs())
        .product();
    chi(alpha).abs() <= tol.eps_p * scale
}

/// Cutoff from the Lipschitz bound: `1 − tanh(μ*h) = |χ|/(4L)`.
pub fn tail_certificate(alpha: &LaminateProfile, tol: &Tolerances) -> Option<TailCertificate> {
    if chi_is_zero(alpha, tol) {
        return None;
    }
    let c = chi(alpha);
    let lipschitz = p_alpha_lipschitz(alpha);
    let gap = (c.abs() / (4.0 * lipschitz)).min(0.5);
    let t_star = 1.0 - gap;
    let mu_star = t_star.atanh() / alpha.width();
    Some(TailCertificate { chi: c, lipschitz, mu_star })
}

/// `m_j = √(λ + sgn(α_j) d)`, or `None` if some radicand is not positive.
pub fn perturbed_m(alpha: &LaminateProfile, lambda: f64, d: f64) -> Option<Vec<f64>> {
    alpha
        .values()
        .iter()
        .map(|a| {
            let rad = lambda + a.signum() * d;
            (rad > 0.0).then(|| rad.sqrt())
        })
        .collect()
}

/// Checks `q̃(m₀, …, m_r) ≠ 0` at `m_j = √(λ_k + sgn(α_j)d)` for every
/// listed `λ_k` (or up to the certified cutoff) and `d ∈ {0, ±δ : δ ∈ δ_grid}`.
pub fn qcrit_check(
    alpha: &LaminateProfile,
    seq: &DiscreteSequence,
    delta_grid: &[f64],
    policy: KCutoffPolicy,
    tol: &Tolerances,
) -> Result<QCriterionResult> {
    ensure_finite("δ grid", delta_grid)?;
    if delta_grid.iter().any(|&d| d <= 0.0) {
        return Err(Error::InvalidInput("δ grid values must be positive".into()));
    }
    let mut deltas = delta_grid.to_vec();
    deltas.sort_by(f64::total_cmp);
    deltas.dedup();

    let mut notes = Vec::new();
    if require_nondegenerate(alpha, tol).is_err() {
        notes.push("m(α⁻¹) vanishes: the criterion does not imply well-posedness".to_string());
    }
    let tail = tail_certificate(alpha, tol);
    let cutoff = match (policy, tail) {
        (KCutoffPolicy::Auto, Some(t)) => t.mu_star,
        _ => f64::INFINITY,
    };

    let mut k_checked = 0;
    let mut k_certified = 0;
    let mut min_relative = f64::INFINITY;
    let mut skipped = Vec::new();
    // number of sorted δ values that passed so far for every k
    let mut delta_pass = deltas.len();
    let mut violation: Option<Witness> = None;

    for (k_index, &lambda) in seq.values().iter().enumerate() {
        let mu = lambda.sqrt();
        if mu > cutoff {
            k_certified += 1;
            continue;
        }
        k_checked += 1;
        let eval = |d: f64| -> Result<Option<Witness>> {
            let Some(m) = perturbed_m(alpha, lambda, d) else {
                return Ok(None);
            };
            let e = q_tilde_eval(alpha, &m)?;
            Ok(Some(Witness {
                k_index,
                lambda,
                d,
                value: mu * e.value,
                magnitude: mu * e.magnitude,
            }))
        };
        let zero = |w: &Witness| w.value == 0.0 || w.value.abs() <= tol.eps_p * w.magnitude;
        let w0 = eval(0.0)?.expect("λ_k > 0");
        min_relative = min_relative.min(relative(&w0));
        if zero(&w0) {
            violation = Some(w0);
            break;
        }
        for (i, &delta) in deltas.iter().enumerate().take(delta_pass) {
            let mut failed = false;
            for d in [delta, -delta] {
                match eval(d)? {
                    None => skipped.push((k_index, d)),
                    Some(w) => {
                        min_relative = min_relative.min(relative(&w));
                        failed |= zero(&w);
                    }
                }
            }
            if failed {
                delta_pass = i;
                break;
            }
        }
    }

    let delta0 = if delta_pass == 0 { 0.0 } else { deltas[delta_pass - 1] };
    if !skipped.is_empty() {
        notes.push(format!(
            "{} (k, d) pairs skipped because λ_k + sgn(α_j)d ≤ 0",
            skipped.len()
        ));
    }
    let verdict = if let Some(witness) = violation {
        Verdict::Violated { witness }
    } else if !deltas.is_empty() && delta_pass == 0 {
        Verdict::Inconclusive {
            reason: format!("q̃ vanishes at the smallest grid δ = {:e}", deltas[0]),
        }
    } else if seq.is_truncation() && tail.is_none() {
        Verdict::Inconclusive {
            reason: "χ(α) = 0: asymptotic certification impossible; only the listed modes were checked"
                .into(),
        }
    } else {
        Verdict::Satisfied
    };
    if let Some(t) = tail {
        if seq.is_truncation() {
            notes.push(format!(
                "modes beyond the listed ones are certified for μ ≥ {:e} through χ(α) = {:e}",
                t.mu_star, t.chi
            ));
        }
    }
    Ok(QCriterionResult {
        verdict,
        delta0,
        k_checked,
        k_certified,
        tail,
        min_relative: if min_relative.is_finite() { min_relative } else { 0.0 },
        skipped,
        notes,
    })
}

fn relative(w: &Witness) -> f64 {
    if w.magnitude > 0.0 {
        w.value.abs() / w.magnitude
    } else {
        0.0
    }
}

/// Roots of `p_α` in `(lo, hi]`, `0 ≤ lo < hi`, isolated by a Sturm chain on
/// the extracted coefficients. The trivial root `t = 0` is divided out.
pub fn p_alpha_roots(alpha: &LaminateProfile, lo: f64, hi: f64, tol: &Tolerances) -> Result<Vec<f64>> {
    if !(lo >= 0.0 && lo < hi) {
        return Err(Error::InvalidInput(format!("need 0 ≤ lo < hi, got [{lo}, {hi}]")));
    }
    let (p, abs) = p_alpha_poly(alpha);
    let reference = abs.max_abs_coeff();
    let p = p.trimmed(tol.eps_p, reference);
    if p.is_zero() {
        return Err(Error::Singular("p_α vanishes identically".into()));
    }
    // p_α(0) = 0 always
    let deflated = Poly::new(p.coeffs().iter().skip(1).copied().collect());
    Ok(deflated
        .real_roots_in(lo, hi, 1e-13)
        .into_iter()
        .filter(|&t| t > lo)
        .collect())
}

/// Sufficient condition: `p_α` has no root in `[t₀, 1]`, `t₀ = tanh(√λ_min h)`.
pub fn well_posed_dd(alpha: &LaminateProfile, seq: &DiscreteSequence, tol: &Tolerances) -> Result<bool> {
    require_nondegenerate(alpha, tol)?;
    let t0 = (seq.min().sqrt() * alpha.width()).tanh();
    let (p, abs) = p_alpha_poly(alpha);
    let p = p.trimmed(tol.eps_p, abs.max_abs_coeff());
    if p.is_zero() {
        return Ok(false);
    }
    if p.eval(t0) == 0.0 {
        return Ok(false);
    }
    Ok(p_alpha_roots(alpha, t0, 1.0, tol)?.is_empty())
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ScanRoot {
    pub s: f64,
    pub t: f64,
    /// Index into the sequence, `None` for the limit point `t = 1`.
    pub k_index: Option<usize>,
    /// `|p_{α−s}(t)|` relative to its magnitude on independent re-evaluation.
    pub residual: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GridCrossCheck {
    pub resolution: f64,
    pub sign_changes: usize,
    /// Sign changes whose bracket contains no enumerated root.
    pub unmatched: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SpectrumReportDD {
    pub value_points: Vec<f64>,
    pub scan_roots: Vec<ScanRoot>,
    pub mean_zero_shifts: Vec<f64>,
    pub bound: f64,
    /// The continuous part is only known to lie in `[−A, A]`.
    pub continuous_spectrum_caveat: bool,
    pub cross_check: Option<GridCrossCheck>,
}

impl SpectrumReportDD {
    /// Distinct shifts `s` over all scan roots.
    pub fn root_shifts(&self) -> Vec<f64> {
        let mut s: Vec<f64> = self.scan_roots.iter().map(|r| r.s).collect();
        s.sort_by(f64::total_cmp);
        s.dedup_by(|a, b| (*a - *b).abs() <= 1e-12 * a.abs().max(1.0));
        s
    }
}

/// `N_t(s) = e₁ᵀ Q_r ⋯ Q_0 e₂`, `Q_j = [[α_j − s, t], [(α_j − s)² t, α_j − s]]`,
/// so that `p_{α−s}(t) = N_t(s) / ∏_{j≥1}(α_j − s)`.
pub fn shift_numerator(alpha: &LaminateProfile, t: f64) -> Poly {
    let mats = alpha.values().iter().map(|&a| {
        let shifted = Poly::linear(a, -1.0);
        [
            [shifted.clone(), Poly::constant(t)],
            [(shifted.clone() * shifted.clone()).scale(t), shifted],
        ]
    });
    transfer(Poly::constant(1.0), Poly::zero(), mats)
}

/// Re-evaluates `p_{α−s}(t)` through `μ q̃(μ,…,μ)` with `t = tanh(μh)`,
/// or through `χ(α−s)` at `t = 1`. Returns the relative residual.
pub fn scan_residual(alpha: &LaminateProfile, s: f64, t: f64) -> Result<f64> {
    let shifted = alpha.shifted(s)?;
    if t >= 1.0 {
        let c = chi(&shifted);
        let scale: f64 = shifted
            .values()
            .windows(2)
            .map(|w| 1.0 + (w[0] / w[1]).abs())
            .product();
        return Ok(c.abs() / scale);
    }
    let mu = t.atanh() / alpha.width();
    let e = q_tilde_eval(&shifted, &vec![mu; alpha.slab_count()])?;
    Ok(e.relative())
}

fn roots_for_t(alpha: &LaminateProfile, t: f64, bound: f64, tol: &Tolerances) -> Vec<(f64, f64)> {
    let raw = shift_numerator(alpha, t);
    let n = raw.trimmed(1e-14, raw.max_abs_coeff());
    let dn = n.derivative();
    let pole_gap = 1e-10 * alpha.max_abs().max(1.0);
    let mut out: Vec<(f64, f64)> = n
        .complex_roots()
        .into_iter()
        .filter(|z| z.im.abs() <= 1e-6 * z.norm().max(1.0))
        .map(|z| {
            let mut s = z.re;
            for _ in 0..3 {
                let d = dn.eval(s);
                if d == 0.0 {
                    break;
                }
                let cand = s - n.eval(s) / d;
                if cand.is_finite() && n.eval(cand).abs() < n.eval(s).abs() {
                    s = cand;
                } else {
                    break;
                }
            }
            s
        })
        .filter(|&s| s.abs() <= bound)
        .filter(|&s| alpha.values().iter().all(|a| (a - s).abs() > pole_gap))
        .filter_map(|s| {
            let res = scan_residual(alpha, s, t).ok()?;
            (res <= tol.root_residual).then_some((s, res))
        })
        .collect();
    out.sort_by(|a, b| a.0.total_cmp(&b.0));
    out.dedup_by(|a, b| (a.0 - b.0).abs() <= 1e-10 * a.0.abs().max(1.0));
    out
}

fn grid_cross_check(
    alpha: &LaminateProfile,
    ts: &[(f64, Option<usize>)],
    roots: &[ScanRoot],
    bound: f64,
    resolution: f64,
) -> GridCrossCheck {
    let steps = ((2.0 * bound) / resolution).ceil().max(1.0) as usize;
    let grid: Vec<f64> = (0..=steps)
        .map(|i| -bound + 2.0 * bound * i as f64 / steps as f64)
        .collect();
    let poles = alpha.values();
    let mut sign_changes = 0;
    let mut unmatched = 0;
    for &(t, _) in ts {
        let n = shift_numerator(alpha, t);
        let f = |s: f64| {
            let den: f64 = poles[1..].iter().map(|a| a - s).product();
            n.eval(s) / den
        };
        for w in grid.windows(2) {
            let (a, b) = (w[0], w[1]);
            if poles.iter().any(|&p| p >= a && p <= b) {
                continue;
            }
            let (fa, fb) = (f(a), f(b));
            if fa == 0.0 || fa.signum() == fb.signum() {
                continue;
            }
            sign_changes += 1;
            let found = roots
                .iter()
                .any(|r| r.t == t && r.s >= a - 1e-12 && r.s <= b + 1e-12);
            if !found {
                unmatched += 1;
            }
        }
    }
    GridCrossCheck { resolution, sign_changes, unmatched }
}

/// Discrete part of the inner spectrum: roots `s ∈ [−A, A]` of
/// `s ↦ p_{α−s}(t)` for `t ∈ {tanh(√λ_k h)} ∪ {1}`, the coefficient values and
/// the shifts with `𝔪((α−s)⁻¹) = 0`.
pub fn inner_spectrum_dd(
    alpha: &LaminateProfile,
    seq: &DiscreteSequence,
    bound: f64,
    s_resolution: Option<f64>,
    tol: &Tolerances,
) -> Result<SpectrumReportDD> {
    if !(bound.is_finite() && bound > alpha.max_abs()) {
        return Err(Error::InvalidInput(format!(
            "A = {bound} must exceed max|α_j| = {}",
            alpha.max_abs()
        )));
    }
    if let Some(res) = s_resolution {
        if !(res.is_finite() && res > 0.0) {
            return Err(Error::InvalidInput("s resolution must be positive".into()));
        }
    }
    let h = alpha.width();
    let mut ts: Vec<(f64, Option<usize>)> = seq
        .values()
        .iter()
        .enumerate()
        .map(|(k, &l)| ((l.sqrt() * h).tanh(), Some(k)))
        .filter(|&(t, _)| t < 1.0)
        .collect();
    ts.push((1.0, None));

    let mut scan_roots: Vec<ScanRoot> = ts
        .iter()
        .flat_map(|&(t, k_index)| {
            roots_for_t(alpha, t, bound, tol)
                .into_iter()
                .map(move |(s, residual)| ScanRoot { s, t, k_index, residual })
        })
        .collect();
    scan_roots.sort_by(|a, b| a.s.total_cmp(&b.s).then(a.t.total_cmp(&b.t)));

    let mut mean_zero_shifts: Vec<f64> = mean_zero_roots(alpha, tol)
        .into_iter()
        .filter(|z| z.im == 0.0 && z.re.abs() <= bound)
        .map(|z| z.re)
        .collect();
    mean_zero_shifts.sort_by(f64::total_cmp);

    let cross_check = s_resolution.map(|res| grid_cross_check(alpha, &ts, &scan_roots, bound, res));
    Ok(SpectrumReportDD {
        value_points: collapse_values(alpha.values()).into_iter().map(|(v, _)| v).collect(),
        scan_roots,
        mean_zero_shifts,
        bound,
        continuous_spectrum_caveat: true,
        cross_check,
    })
}

/// `p_{α−s}(t)` evaluated directly; convenience for callers that only need the value.
pub fn shifted_p_alpha(alpha: &LaminateProfile, s: f64, t: f64) -> Result<f64> {
    p_alpha_eval(&alpha.shifted(s)?, t).map(|e| e.value)
}
