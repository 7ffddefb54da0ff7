//! Laminate profiles and the slab-by-slab transfer machinery.
//!
//! A profile `α = Σ α_j 1_{(jh,(j+1)h]}` with `h = 1/(r+1)` is propagated
//! through the slabs in flux coordinates `(u, αu′)`. Starting from
//! `(0, α₀)` at `x = 0` and reading off the first component at `x = 1`
//! gives the characteristic function `p_{α,β}`; replacing each slab matrix by
//! its cosh-normalised form gives `q̃`, and `p_α(t)` is the same product
//! with every `tanh(m_j h)` replaced by a common `t`.

use std::ops::{Add, Mul};

use serde::{Deserialize, Serialize};

use crate::error::{ensure_finite, Error, Result};
use crate::poly::Poly;
use crate::tolerance::Tolerances;

/// Piecewise-constant coefficient on `r + 1` equal slabs of `(0, 1)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "Vec<f64>", into = "Vec<f64>")]
pub struct LaminateProfile {
    values: Vec<f64>,
}

impl LaminateProfile {
    pub fn new(values: Vec<f64>) -> Result<Self> {
        Self::with_zero_tolerance(values, Tolerances::default().value_zero)
    }

    pub fn with_zero_tolerance(values: Vec<f64>, zero_tol: f64) -> Result<Self> {
        if values.is_empty() {
            return Err(Error::InvalidInput("a profile needs at least one slab".into()));
        }
        ensure_finite("α", &values)?;
        if let Some(j) = values.iter().position(|v| v.abs() <= zero_tol) {
            return Err(Error::InvalidInput(format!(
                "α[{j}] = {} is zero (|α_j| must exceed {zero_tol:e})",
                values[j]
            )));
        }
        Ok(LaminateProfile { values })
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn slab_count(&self) -> usize {
        self.values.len()
    }

    /// Index of the last slab, `r`.
    pub fn r(&self) -> usize {
        self.values.len() - 1
    }

    /// Slab width `h = 1/(r+1)`.
    pub fn width(&self) -> f64 {
        1.0 / self.values.len() as f64
    }

    pub fn max_abs(&self) -> f64 {
        self.values.iter().fold(0.0, |m, v| m.max(v.abs()))
    }

    pub fn max_abs_inv(&self) -> f64 {
        self.values.iter().fold(0.0, |m, v| m.max(1.0 / v.abs()))
    }

    /// Value at `x ∈ (0,1)`; slab `j` covers `(jh, (j+1)h]`.
    pub fn at(&self, x: f64) -> f64 {
        let n = self.values.len();
        let j = ((x * n as f64).ceil() as usize).clamp(1, n) - 1;
        self.values[j]
    }

    /// `α − s`, slab-wise.
    pub fn shifted(&self, s: f64) -> Result<Self> {
        Self::new(self.values.iter().map(|v| v - s).collect())
    }

    /// `μ α`, slab-wise.
    pub fn scaled(&self, mu: f64) -> Result<Self> {
        Self::new(self.values.iter().map(|v| v * mu).collect())
    }
}

impl TryFrom<Vec<f64>> for LaminateProfile {
    type Error = Error;
    fn try_from(values: Vec<f64>) -> Result<Self> {
        LaminateProfile::new(values)
    }
}

impl From<LaminateProfile> for Vec<f64> {
    fn from(p: LaminateProfile) -> Self {
        p.values
    }
}

/// ODE regime of `u″ = τu` on one slab.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Regime {
    Zero,
    Positive { mu: f64 },
    Negative { mu: f64 },
}

impl Regime {
    pub fn of(tau: f64) -> Regime {
        if tau > 0.0 {
            Regime::Positive { mu: tau.sqrt() }
        } else if tau < 0.0 {
            Regime::Negative { mu: (-tau).sqrt() }
        } else {
            Regime::Zero
        }
    }
}

/// Maps `(u(0), u′(0))` to `(u(h), u′(h))` for solutions of `u″ = τu`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TransitionMatrix {
    pub a00: f64,
    pub a01: f64,
    pub a10: f64,
    pub a11: f64,
    pub regime: Regime,
}

impl TransitionMatrix {
    pub fn det(&self) -> f64 {
        self.a00 * self.a11 - self.a01 * self.a10
    }

    /// `|det − 1|` relative to the size of the diagonal product, which is
    /// what rounding allows when `cosh(μh)` is large.
    pub fn det_defect(&self) -> f64 {
        (self.det() - 1.0).abs() / (self.a00 * self.a11).abs().max(1.0)
    }

    pub fn apply(&self, v: [f64; 2]) -> [f64; 2] {
        [
            self.a00 * v[0] + self.a01 * v[1],
            self.a10 * v[0] + self.a11 * v[1],
        ]
    }

    /// `diag(1, α) A diag(1, α⁻¹)`: the same map in flux coordinates `(u, αu′)`.
    pub fn in_flux_coordinates(&self, alpha: f64) -> [[f64; 2]; 2] {
        [[self.a00, self.a01 / alpha], [alpha * self.a10, self.a11]]
    }
}

pub fn transition_matrix(h: f64, tau: f64) -> Result<TransitionMatrix> {
    ensure_finite("(h, τ)", &[h, tau])?;
    if h <= 0.0 {
        return Err(Error::InvalidInput(format!("slab width h = {h} must be positive")));
    }
    let regime = Regime::of(tau);
    let m = match regime {
        Regime::Zero => [[1.0, h], [0.0, 1.0]],
        Regime::Positive { mu } => {
            let (c, s) = ((mu * h).cosh(), (mu * h).sinh());
            [[c, s / mu], [mu * s, c]]
        }
        Regime::Negative { mu } => {
            let (s, c) = (mu * h).sin_cos();
            [[c, s / mu], [-mu * s, c]]
        }
    };
    Ok(TransitionMatrix {
        a00: m[0][0],
        a01: m[0][1],
        a10: m[1][0],
        a11: m[1][1],
        regime,
    })
}

/// Value of a transfer product together with the same product taken over
/// absolute values, which serves as the scale for "is this zero" decisions.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Evaluation {
    pub value: f64,
    pub magnitude: f64,
}

impl Evaluation {
    pub fn is_zero(&self, eps: f64) -> bool {
        self.value == 0.0 || self.value.abs() <= eps * self.magnitude
    }

    pub fn relative(&self) -> f64 {
        if self.magnitude > 0.0 {
            self.value.abs() / self.magnitude
        } else {
            0.0
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum EvaluationForm {
    Raw,
    TanhScaled,
}

/// `p_{α,β}` either as the raw product (`scale = 1`) or as a tanh-scaled
/// product with `∏ cosh(m_j h)` over the hyperbolic slabs pulled out.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CharacteristicEvaluation {
    pub value: f64,
    pub scale: f64,
    pub magnitude: f64,
    pub form: EvaluationForm,
}

impl CharacteristicEvaluation {
    /// `scale × value`; may overflow to infinity for the tanh-scaled form.
    pub fn raw_value(&self) -> f64 {
        self.scale * self.value
    }

    pub fn is_zero(&self, eps: f64) -> bool {
        self.value == 0.0 || self.value.abs() <= eps * self.magnitude
    }
}

/// Propagates `(0, α₀)` through `mats` (slab 0 first) and returns the first
/// component, i.e. `α₀ e₁ᵀ M_r ⋯ M_0 e₂`.
pub(crate) fn transfer<T, I>(alpha0: T, zero: T, mats: I) -> T
where
    T: Clone + Add<Output = T> + Mul<Output = T>,
    I: IntoIterator<Item = [[T; 2]; 2]>,
{
    let mut v = [zero, alpha0];
    for m in mats {
        let [[m00, m01], [m10, m11]] = m;
        v = [
            m00 * v[0].clone() + m01 * v[1].clone(),
            m10 * v[0].clone() + m11 * v[1].clone(),
        ];
    }
    let [u, _] = v;
    u
}

fn transfer_eval(alpha0: f64, mats: &[[[f64; 2]; 2]]) -> Evaluation {
    let value = transfer(alpha0, 0.0, mats.iter().copied());
    let abs = |m: &[[f64; 2]; 2]| [[m[0][0].abs(), m[0][1].abs()], [m[1][0].abs(), m[1][1].abs()]];
    let magnitude = transfer(alpha0.abs(), 0.0, mats.iter().map(abs));
    Evaluation { value, magnitude }
}

fn check_companion(alpha: &LaminateProfile, what: &str, other: &[f64]) -> Result<()> {
    if other.len() != alpha.slab_count() {
        return Err(Error::InvalidInput(format!(
            "{what} has {} entries but the profile has {} slabs",
            other.len(),
            alpha.slab_count()
        )));
    }
    ensure_finite(what, other)
}

/// `p_{α,β}` as the plain product of the flux-coordinate transition matrices.
pub fn char_function_raw(alpha: &LaminateProfile, beta: &[f64]) -> Result<CharacteristicEvaluation> {
    check_companion(alpha, "β", beta)?;
    let h = alpha.width();
    let mats = alpha
        .values()
        .iter()
        .zip(beta)
        .map(|(&a, &b)| transition_matrix(h, b / a).map(|t| t.in_flux_coordinates(a)))
        .collect::<Result<Vec<_>>>()?;
    let e = transfer_eval(alpha.values()[0], &mats);
    Ok(CharacteristicEvaluation {
        value: e.value,
        scale: 1.0,
        magnitude: e.magnitude,
        form: EvaluationForm::Raw,
    })
}

/// `p_{α,β}` with `cosh(m_j h)` factored out of every slab where `β_j/α_j > 0`.
pub fn char_function_scaled(
    alpha: &LaminateProfile,
    beta: &[f64],
) -> Result<CharacteristicEvaluation> {
    check_companion(alpha, "β", beta)?;
    let h = alpha.width();
    let mut log_scale = 0.0;
    let mut mats = Vec::with_capacity(beta.len());
    for (&a, &b) in alpha.values().iter().zip(beta) {
        let tau = b / a;
        let m = match Regime::of(tau) {
            Regime::Positive { mu } => {
                log_scale += log_cosh(mu * h);
                let t = (mu * h).tanh();
                [[1.0, t / (a * mu)], [a * mu * t, 1.0]]
            }
            _ => transition_matrix(h, tau)?.in_flux_coordinates(a),
        };
        mats.push(m);
    }
    let e = transfer_eval(alpha.values()[0], &mats);
    Ok(CharacteristicEvaluation {
        value: e.value,
        scale: log_scale.exp(),
        magnitude: e.magnitude,
        form: EvaluationForm::TanhScaled,
    })
}

/// Characteristic function `p_{α,β}`.
///
/// When every `β_j/α_j ≥ 0` the tanh-scaled form is returned. Otherwise the
/// raw product is tried first and the scaled form is used if it overflows.
pub fn char_function(alpha: &LaminateProfile, beta: &[f64]) -> Result<CharacteristicEvaluation> {
    check_companion(alpha, "β", beta)?;
    let all_nonneg = alpha.values().iter().zip(beta).all(|(a, b)| b / a >= 0.0);
    if all_nonneg {
        return char_function_scaled(alpha, beta);
    }
    let raw = char_function_raw(alpha, beta)?;
    if raw.value.is_finite() && raw.magnitude.is_finite() {
        Ok(raw)
    } else {
        char_function_scaled(alpha, beta)
    }
}

/// `log cosh(x)` without overflow.
pub fn log_cosh(x: f64) -> f64 {
    let x = x.abs();
    x + (-2.0 * x).exp().ln_1p() - std::f64::consts::LN_2
}

/// `1 − tanh(s)` evaluated as `2e^{−2s}/(1+e^{−2s})`.
pub fn one_minus_tanh(s: f64) -> f64 {
    let e = (-2.0 * s).exp();
    2.0 * e / (1.0 + e)
}

fn p_alpha_mats(alpha: &LaminateProfile, t: f64) -> Vec<[[f64; 2]; 2]> {
    alpha
        .values()
        .iter()
        .map(|&a| [[1.0, t / a], [a * t, 1.0]])
        .collect()
}

fn check_t(t: f64) -> Result<()> {
    ensure_finite("t", &[t])?;
    if !(t > 0.0 && t <= 1.0) {
        return Err(Error::InvalidInput(format!("t = {t} must lie in (0, 1]")));
    }
    Ok(())
}

/// `p_α(t) = (1, α_r⁻¹t) ∏_{j=r−1}^{1} [[1, α_j⁻¹t], [α_j t, 1]] (t, α₀)ᵀ`.
pub fn p_alpha(alpha: &LaminateProfile, t: f64) -> Result<f64> {
    p_alpha_eval(alpha, t).map(|e| e.value)
}

pub fn p_alpha_eval(alpha: &LaminateProfile, t: f64) -> Result<Evaluation> {
    check_t(t)?;
    Ok(transfer_eval(alpha.values()[0], &p_alpha_mats(alpha, t)))
}

/// Coefficients of `p_α` in `t`, accumulated exactly through the matrix
/// product (degree at most `r + 1`). The second polynomial is the same
/// product over absolute values and bounds every intermediate term.
pub fn p_alpha_poly(alpha: &LaminateProfile) -> (Poly, Poly) {
    let build = |abs: bool| {
        let f = |x: f64| if abs { x.abs() } else { x };
        let mats = alpha.values().iter().map(|&a| {
            [
                [Poly::constant(1.0), Poly::linear(0.0, f(1.0 / a))],
                [Poly::linear(0.0, f(a)), Poly::constant(1.0)],
            ]
        });
        transfer(Poly::constant(f(alpha.values()[0])), Poly::zero(), mats)
    };
    (build(false), build(true))
}

/// `χ(α) = ∏_{j=0}^{r−1} (1 + α_{j+1}⁻¹ α_j)`.
pub fn chi(alpha: &LaminateProfile) -> f64 {
    alpha
        .values()
        .windows(2)
        .map(|w| 1.0 + w[0] / w[1])
        .product()
}

fn check_m(alpha: &LaminateProfile, m: &[f64]) -> Result<()> {
    check_companion(alpha, "m", m)?;
    if let Some(j) = m.iter().position(|&v| v <= 0.0) {
        return Err(Error::InvalidInput(format!("m[{j}] = {} must be positive", m[j])));
    }
    Ok(())
}

/// `q̃(m₀, …, m_r)` with `t_j = tanh(m_j h)`.
pub fn q_tilde(alpha: &LaminateProfile, m: &[f64]) -> Result<f64> {
    q_tilde_eval(alpha, m).map(|e| e.value)
}

pub fn q_tilde_eval(alpha: &LaminateProfile, m: &[f64]) -> Result<Evaluation> {
    check_m(alpha, m)?;
    let h = alpha.width();
    let mats: Vec<_> = alpha
        .values()
        .iter()
        .zip(m)
        .map(|(&a, &mj)| {
            let t = (mj * h).tanh();
            [[1.0, t / (a * mj)], [a * mj * t, 1.0]]
        })
        .collect();
    Ok(transfer_eval(alpha.values()[0], &mats))
}

/// `w̃(m₀, …, m_r)`: `q̃` with every `t_j` replaced by 1.
pub fn w_tilde(alpha: &LaminateProfile, m: &[f64]) -> Result<f64> {
    check_m(alpha, m)?;
    let mats: Vec<_> = alpha
        .values()
        .iter()
        .zip(m)
        .map(|(&a, &mj)| [[1.0, 1.0 / (a * mj)], [a * mj, 1.0]])
        .collect();
    Ok(transfer(alpha.values()[0], 0.0, mats))
}

/// `|μ q̃(μ,…,μ) − χ(α)| = |p_α(t) − p_α(1)|` at `t = tanh(μh)`, evaluated
/// as `(1 − t)|Q(t)|` with `p_α(1) − p_α(t) = (1 − t)Q(t)`, which keeps the
/// exponentially small gap representable after `tanh(μh)` rounds to 1.
pub fn chi_gap(alpha: &LaminateProfile, mu: f64) -> Result<f64> {
    ensure_finite("μ", &[mu])?;
    if mu <= 0.0 {
        return Err(Error::InvalidInput(format!("μ = {mu} must be positive")));
    }
    let (p, _) = p_alpha_poly(alpha);
    let (q, _) = p.div_rem(&Poly::linear(-1.0, 1.0));
    let s = mu * alpha.width();
    Ok(one_minus_tanh(s) * q.eval(s.tanh()).abs())
}
