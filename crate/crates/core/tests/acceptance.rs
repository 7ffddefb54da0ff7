//! Acceptance gate. Prints one `PASS`/`FAIL` line per criterion and exits
//! non-zero if any criterion fails. Tolerances and runtime budgets are pinned
//! below.

use std::f64::consts::PI;
use std::process::ExitCode;
use std::time::{Duration, Instant};

use laminate_spectra::homogenisation::{
    classify, limit_coefficient, limit_inner_spectrum, modes, multiplier_at_zero, resolvent_multiplier,
    HomogenisationCase, HomogenisedLimit, SpectrumKind,
};
use laminate_spectra::laminate::{char_function, chi, chi_gap, p_alpha, p_alpha_eval, q_tilde, q_tilde_eval, w_tilde};
use laminate_spectra::multi_dim::p_alpha_roots;
use laminate_spectra::one_dim::{mean, mean_inv, projected_residual, solve_projected_1d, GridFunction};
use laminate_spectra::oracle::galerkin::nearest_distance;
use laminate_spectra::oracle::{assemble_fd_1d, assemble_galerkin, galerkin_spectrum, GalerkinCoefficient};
use laminate_spectra::{LaminateProfile, Tolerances};
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

const MEAN_IDENTITY_REL: f64 = 1e-10;
const CROSSWALK_ABS: f64 = 1e-12;
const SHIFTED_ROOT_ABS: f64 = 1e-8;
const PROJECTED_RESIDUAL: f64 = 1e-10;
const FD_HALVING_RATIO: f64 = 1.9;
const GAMMA_ABS: f64 = 1e-8;
const CONTAINMENT: f64 = 1e-3;
const HOM_FORMULA_ABS: f64 = 1e-12;
const MULTIPLIER_ABS: f64 = 1e-6;
const BRIDGE_ZERO: f64 = 1e-8;
const W_IDENTITY_ABS: f64 = 1e-12;
const GAP_AGREEMENT: f64 = 1e-13;

struct Outcome {
    pass: bool,
    detail: String,
}

fn profile(v: &[f64]) -> LaminateProfile {
    LaminateProfile::new(v.to_vec()).expect("valid profile")
}

fn random_value(rng: &mut ChaCha8Rng, lo: f64, hi: f64) -> f64 {
    let mag = rng.gen_range(lo..hi);
    if rng.gen_bool(0.5) {
        mag
    } else {
        -mag
    }
}

fn random_profile(rng: &mut ChaCha8Rng, slabs: usize, lo: f64, hi: f64) -> LaminateProfile {
    profile(&(0..slabs).map(|_| random_value(rng, lo, hi)).collect::<Vec<_>>())
}

fn sign_indefinite(rng: &mut ChaCha8Rng, slabs: usize, lo: f64, hi: f64) -> LaminateProfile {
    loop {
        let p = random_profile(rng, slabs, lo, hi);
        let pos = p.values().iter().any(|&v| v > 0.0);
        let neg = p.values().iter().any(|&v| v < 0.0);
        if pos && neg {
            return p;
        }
    }
}

fn alternating(r: usize, s: f64) -> LaminateProfile {
    profile(&(0..=r).map(|j| if j % 2 == 0 { 1.0 + s } else { -1.0 + s }).collect::<Vec<_>>())
}

fn characteristic_mean_identity() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    let mut worst = 0.0f64;
    for _ in 0..200 {
        let slabs = rng.gen_range(1..=9);
        let a = random_profile(&mut rng, slabs, 0.1, 10.0);
        let p = char_function(&a, &vec![0.0; slabs]).unwrap().raw_value();
        let want = a.values()[0] * mean_inv(&a);
        worst = worst.max((p - want).abs() / want.abs());
    }
    Outcome {
        pass: worst < MEAN_IDENTITY_REL,
        detail: format!("max relative error {worst:.3e} over 200 profiles"),
    }
}

fn degenerate_crosswalk() -> Outcome {
    let mut worst = 0.0f64;
    for r in [1, 3, 5, 7] {
        let a = alternating(r, 0.0);
        for i in 1..=50 {
            worst = worst.max(p_alpha(&a, i as f64 / 50.0).unwrap().abs());
        }
    }
    Outcome { pass: worst < CROSSWALK_ABS, detail: format!("max |p_α(t)| = {worst:.3e}") }
}

fn shifted_root() -> Outcome {
    let tol = Tolerances::default();
    let mut worst = 0.0f64;
    let mut ok = true;
    for s in [0.1f64, -0.1, 0.3, -0.3, 0.6, -0.6] {
        let roots = p_alpha_roots(&alternating(3, s), 0.0, 1.0, &tol).unwrap();
        let z = ((1.0 - s * s) / (1.0 + s * s)).sqrt();
        match roots.as_slice() {
            [t] => worst = worst.max((t - z).abs()),
            _ => ok = false,
        }
    }
    Outcome {
        pass: ok && worst < SHIFTED_ROOT_ABS,
        detail: format!("single positive root per shift: {ok}; max |t − z(s)| = {worst:.3e}"),
    }
}

/// Random mean-zero trigonometric ψ and its derivative.
struct Trig {
    a: Vec<f64>,
    b: Vec<f64>,
}

impl Trig {
    fn random(rng: &mut ChaCha8Rng) -> Trig {
        Trig {
            a: (0..4).map(|_| rng.gen_range(-1.0..1.0)).collect(),
            b: (0..4).map(|_| rng.gen_range(-1.0..1.0)).collect(),
        }
    }

    fn value(&self, x: f64) -> f64 {
        (0..4)
            .map(|k| {
                let w = 2.0 * PI * (k + 1) as f64;
                self.a[k] * (w * x).cos() + self.b[k] * (w * x).sin()
            })
            .sum()
    }

    fn derivative(&self, x: f64) -> f64 {
        (0..4)
            .map(|k| {
                let w = 2.0 * PI * (k + 1) as f64;
                w * (-self.a[k] * (w * x).sin() + self.b[k] * (w * x).cos())
            })
            .sum()
    }
}

/// L₂ distance between the FD solution of `−(αu′)′ = −ψ′` and the
/// antiderivative of the projected-inverse solution, on `n` cells.
fn fd_gap(a: &LaminateProfile, psi: &Trig, n: usize, residual: &mut f64) -> f64 {
    let tol = Tolerances::default();
    let grid = GridFunction::from_fn(n, |x| psi.value(x)).unwrap();
    let centred: Vec<f64> = grid.samples().iter().map(|v| v - grid.mean()).collect();
    let grid = GridFunction::new(centred).unwrap();
    let phi = solve_projected_1d(a, &grid, &tol).unwrap();
    *residual = residual.max(projected_residual(a, &phi, &grid).unwrap());
    let formula = phi.node_antiderivative();
    let op = assemble_fd_1d(a, &vec![0.0; a.slab_count()], n).unwrap();
    let rhs: Vec<f64> = op.nodes().iter().map(|&x| -psi.derivative(x)).collect();
    let u = op.solve(&rhs).unwrap();
    let dx = 1.0 / n as f64;
    (u.iter()
        .zip(&formula[1..n])
        .map(|(x, y)| (x - y).powi(2))
        .sum::<f64>()
        * dx)
        .sqrt()
}

fn solution_formula_vs_fd() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    let mut residual = 0.0f64;
    let mut ok = true;
    let mut parts = Vec::new();
    for v in [vec![1.0, 2.0], vec![1.0, -2.0, 1.0]] {
        let a = profile(&v);
        let slabs = a.slab_count();
        // smallest slab-aligned N ≥ 4096, and its half
        let n = 4096usize.div_ceil(2 * slabs) * 2 * slabs;
        for _ in 0..3 {
            let psi = Trig::random(&mut rng);
            let coarse = fd_gap(&a, &psi, n / 2, &mut residual);
            let fine = fd_gap(&a, &psi, n, &mut residual);
            let ratio = coarse / fine;
            ok &= ratio >= FD_HALVING_RATIO;
            parts.push(format!("{v:?} N={n}: err {fine:.2e}, C=err·N {:.2e}, ratio {ratio:.2}", fine * n as f64));
        }
    }
    Outcome {
        pass: ok && residual < PROJECTED_RESIDUAL,
        detail: format!("identity residual {residual:.2e}; {}", parts.join("; ")),
    }
}

fn gamma_exactness() -> Outcome {
    let mut worst = 0.0f64;
    for gamma in [0.5, 2.0, 4.0] {
        let g = assemble_galerkin(&GalerkinCoefficient::Gamma { gamma }, 2, 30).unwrap();
        let eigs = galerkin_spectrum(&g);
        let mut want: Vec<f64> = modes(2, 30)
            .iter()
            .map(|k| {
                let (k1, k2) = (f64::from(k[0]).powi(2), f64::from(k[1]).powi(2));
                (gamma * k1 + k2) / (k1 + k2)
            })
            .collect();
        want.sort_by(f64::total_cmp);
        for (x, y) in eigs.iter().zip(&want) {
            worst = worst.max((x - y).abs());
        }
    }
    Outcome { pass: worst < GAMMA_ABS, detail: format!("max eigenvalue error {worst:.3e}") }
}

fn coefficient_values_in_spectrum() -> Outcome {
    let coef = GalerkinCoefficient::Laminate { alpha: profile(&[1.0, -2.0, 1.0]) };
    let mut table = Vec::new();
    for m in [20, 30, 40] {
        let eigs = galerkin_spectrum(&assemble_galerkin(&coef, 2, m).unwrap());
        table.push([nearest_distance(&eigs, 1.0), nearest_distance(&eigs, -2.0)]);
    }
    // a value already resolved to roundoff cannot get closer, so the
    // qualitative reading is non-increasing with containment at the finest M
    let decreasing = (0..2).all(|c| table[0][c] >= table[1][c] && table[1][c] >= table[2][c]);
    let contained = table[2].iter().all(|&d| d < CONTAINMENT);
    Outcome {
        pass: decreasing && contained,
        detail: format!(
            "heuristic; δ(M) for (1, −2) at M=20,30,40: {:?}",
            table.iter().map(|r| format!("({:.2e}, {:.2e})", r[0], r[1])).collect::<Vec<_>>()
        ),
    }
}

fn homogenisation_cases() -> Outcome {
    let tol = Tolerances::default();
    let mut ok = true;
    let mut worst = 0.0f64;

    let a = profile(&[1.0, -1.0]);
    ok &= classify(&a, &tol) == HomogenisationCase::DegenerateA;
    ok &= limit_inner_spectrum(&a, 2, 5, &tol).unwrap().kind == SpectrumKind::AllOfC;

    let b = profile(&[1.0, -2.0, 1.0]);
    ok &= classify(&b, &tol) == HomogenisationCase::FourthOrderB;
    ok &= limit_coefficient(&b, 2, &tol).unwrap() == HomogenisedLimit::FourthOrderB { factor: 2.0 };
    for dim in [2, 3] {
        let s = limit_inner_spectrum(&b, dim, 5, &tol).unwrap();
        for p in &s.points {
            let k1 = f64::from(p.k[0]).powi(2);
            let rest: f64 = p.k[1..].iter().map(|&k| f64::from(k).powi(2)).sum();
            worst = worst.max((p.value - 2.0 * k1 / rest).abs());
        }
        for k in modes(dim, 5) {
            let k1 = f64::from(k[0]).powi(2);
            let rest: f64 = k[1..].iter().map(|&k| f64::from(k).powi(2)).sum();
            let direct = 2.0 * k1 / rest;
            ok &= s.points.iter().any(|p| (p.value - direct).abs() <= HOM_FORMULA_ABS);
        }
    }

    let c = profile(&[1.0, -1.0, 1.0]);
    ok &= classify(&c, &tol) == HomogenisationCase::DiagonalC;
    ok &= (mean(&c) - 1.0 / 3.0).abs() < 1e-15 && (mean_inv(&c) - 1.0 / 3.0).abs() < 1e-15;
    let s = limit_inner_spectrum(&c, 2, 5, &tol).unwrap();
    for k in modes(2, 5) {
        let (k1, k2) = (f64::from(k[0]).powi(2), f64::from(k[1]).powi(2));
        let direct = (1.0 / 3.0) * (k1 + k2) / (k1 + k2 / 9.0);
        let nearest = s.points.iter().map(|p| (p.value - direct).abs()).fold(f64::INFINITY, f64::min);
        worst = worst.max(nearest);
    }
    Outcome {
        pass: ok && worst < HOM_FORMULA_ABS,
        detail: format!("cases a/b/c reproduced: {ok}; max formula deviation {worst:.3e}"),
    }
}

fn holomorphic_multipliers() -> Outcome {
    let lambda = Complex64::new(1e-8, 0.0);
    let mut worst = 0.0f64;
    let mut worst_abs = 0.0f64;
    let b = profile(&[1.0, -2.0, 1.0]);
    let c = profile(&[1.0, -1.0, 1.0]);
    for k in modes(2, 5) {
        let (k1, k2) = (f64::from(k[0]).powi(2), f64::from(k[1]).powi(2));
        let closed_b = 0.5 * (k1 + k2) / k1;
        let closed_c = (1.0 / 3.0) * (k1 + k2) / (k1 + k2 / 9.0);
        for (p, closed) in [(&b, closed_b), (&c, closed_c)] {
            let diff = (resolvent_multiplier(p, lambda, &k).unwrap() - closed).norm();
            worst_abs = worst_abs.max(diff);
            worst = worst.max(diff / closed.abs().max(1.0));
            worst = worst.max((multiplier_at_zero(p, &k).unwrap() - closed).abs() / closed.abs().max(1.0));
        }
    }
    let a_value = resolvent_multiplier(&profile(&[1.0, -1.0]), lambda, &[1, 1]).unwrap().norm();
    Outcome {
        pass: worst < MULTIPLIER_ABS && a_value < MULTIPLIER_ABS,
        detail: format!(
            "cases b/c max deviation relative to max(1,|f(0)|) {worst:.3e} (absolute {worst_abs:.3e}); case a |f| = {a_value:.3e}"
        ),
    }
}

fn q_tilde_bridge() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(9);
    let mut disagreements = 0;
    let mut zero_set_mismatch = 0;
    let mut crossings = 0;
    for _ in 0..20 {
        let slabs = rng.gen_range(2..=7);
        let a = sign_indefinite(&mut rng, slabs, 0.2, 5.0);
        let h = a.width();
        let mut signs_q = Vec::new();
        let mut signs_p = Vec::new();
        for i in 0..500 {
            let mu = 0.5 + 49.5 * i as f64 / 499.0;
            let q = mu * q_tilde(&a, &vec![mu; slabs]).unwrap();
            let p = p_alpha_eval(&a, (mu * h).tanh()).unwrap();
            if p.value.abs() > BRIDGE_ZERO {
                if q.signum() != p.value.signum() {
                    disagreements += 1;
                }
                signs_q.push(q.signum());
                signs_p.push(p.value.signum());
            }
        }
        for (wq, wp) in signs_q.windows(2).zip(signs_p.windows(2)) {
            let (cq, cp) = (wq[0] != wq[1], wp[0] != wp[1]);
            crossings += usize::from(cp);
            zero_set_mismatch += usize::from(cq != cp);
        }
    }
    Outcome {
        pass: disagreements == 0 && zero_set_mismatch == 0,
        detail: format!(
            "sign disagreements {disagreements}, zero-set mismatches {zero_set_mismatch}, sign changes seen {crossings}"
        ),
    }
}

fn asymptotic_certificate() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(10);
    let mut identity = 0.0f64;
    let mut monotone = true;
    let mut roundoff = 0.0f64;
    let mut count = 0;
    while count < 20 {
        let slabs = rng.gen_range(1..=6);
        let a = random_profile(&mut rng, slabs, 0.5, 2.0);
        let c = chi(&a);
        if c.abs() < 1e-3 {
            continue;
        }
        count += 1;
        for e in -3..=6 {
            for m in [1.0, 2.5, 7.0] {
                let mu = m * 10f64.powi(e);
                identity = identity.max((mu * w_tilde(&a, &vec![mu; slabs]).unwrap() - c).abs());
            }
        }
        // direct differences bottom out at roundoff once tanh(μh) rounds to 1;
        // the factored gap resolves the exponential decay and must agree with
        // the direct value down to that roundoff
        for mu in [10.0, 100.0, 1000.0] {
            let direct = (mu * q_tilde_eval(&a, &vec![mu; slabs]).unwrap().value - c).abs();
            let gap = chi_gap(&a, mu).unwrap();
            roundoff = roundoff.max((direct - gap).abs() / c.abs().max(1.0));
        }
        let gaps: Vec<f64> = [10.0, 100.0, 1000.0].iter().map(|&mu| chi_gap(&a, mu).unwrap()).collect();
        monotone &= gaps[0] > gaps[1] && gaps[1] > gaps[2];
    }
    Outcome {
        pass: identity < W_IDENTITY_ABS && monotone && roundoff < GAP_AGREEMENT,
        detail: format!(
            "max |μw̃ − χ| = {identity:.3e}; |μq̃ − χ| strictly decreasing: {monotone}; direct vs factored gap {roundoff:.1e}"
        ),
    }
}

fn main() -> ExitCode {
    type Criterion = (&'static str, fn() -> Outcome, Duration);
    let criteria: [Criterion; 10] = [
        ("1 characteristic-mean identity", characteristic_mean_identity, Duration::from_secs(1)),
        ("2 degenerate crosswalk", degenerate_crosswalk, Duration::from_secs(1)),
        ("3 shifted r=3 root", shifted_root, Duration::from_secs(1)),
        ("4 solution formula vs FD", solution_formula_vs_fd, Duration::from_secs(10)),
        ("5 Γ spectrum exactness", gamma_exactness, Duration::from_secs(30)),
        ("6 coefficient values in spectrum", coefficient_values_in_spectrum, Duration::from_secs(120)),
        ("7 homogenisation cases", homogenisation_cases, Duration::from_secs(1)),
        ("8 holomorphic-limit multipliers", holomorphic_multipliers, Duration::from_secs(1)),
        ("9 q̃-criterion bridge", q_tilde_bridge, Duration::from_secs(5)),
        ("10 asymptotic certificate", asymptotic_certificate, Duration::from_secs(1)),
    ];
    let mut failed = 0;
    for (name, run, budget) in criteria {
        let start = Instant::now();
        let outcome = run();
        let elapsed = start.elapsed();
        let in_time = elapsed <= budget;
        let pass = outcome.pass && in_time;
        failed += usize::from(!pass);
        println!(
            "{} [{name}] {} ({:.3}s of {}s)",
            if pass { "PASS" } else { "FAIL" },
            outcome.detail,
            elapsed.as_secs_f64(),
            budget.as_secs()
        );
    }
    println!("acceptance: {} of 10 criteria passed", 10 - failed);
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
