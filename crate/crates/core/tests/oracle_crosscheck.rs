//! Cross-checks between the closed-form routes and the discrete oracles.

use laminate_spectra::laminate::{char_function, q_tilde_eval};
use laminate_spectra::multi_dim::{dirichlet_eigenvalues, tail_certificate};
use laminate_spectra::one_dim::{
    inner_spectrum_1d, is_well_posed_1d, mean_inv, mean_resolvent, projected_residual, solve_projected_1d,
    GridFunction,
};
use laminate_spectra::oracle::galerkin::nearest_distance;
use laminate_spectra::oracle::{assemble_fd_1d, assemble_galerkin, galerkin_spectrum, GalerkinCoefficient};
use laminate_spectra::{LaminateProfile, Tolerances};
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn prof(v: &[f64]) -> LaminateProfile {
    LaminateProfile::new(v.to_vec()).unwrap()
}

fn nonzero() -> impl Strategy<Value = f64> {
    prop_oneof![-10.0f64..-0.1, 0.1f64..10.0]
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn zero_potential_characteristic_is_scaled_mean(v in prop::collection::vec(nonzero(), 1..10)) {
        let a = prof(&v);
        let p = char_function(&a, &vec![0.0; v.len()]).unwrap().raw_value();
        let want = v[0] * mean_inv(&a);
        prop_assert!((p - want).abs() <= 1e-10 * want.abs());
    }

    #[test]
    fn projected_solution_satisfies_identity(
        v in prop::collection::vec(nonzero(), 1..6),
        coeffs in prop::collection::vec(-1.0f64..1.0, 6),
        per in 4usize..40,
    ) {
        let a = prof(&v);
        prop_assume!(is_well_posed_1d(&a, &Tolerances::default()));
        let n = per * v.len();
        let raw = GridFunction::from_fn(n, |x| {
            coeffs.iter().enumerate().map(|(k, c)| c * ((k + 1) as f64 * 5.3 * x).sin()).sum()
        }).unwrap();
        let m = raw.mean();
        let psi = GridFunction::new(raw.samples().iter().map(|s| s - m).collect()).unwrap();
        let phi = solve_projected_1d(&a, &psi, &Tolerances::default()).unwrap();
        let scale = psi.max_abs().max(1.0) * a.max_abs() * a.max_abs_inv();
        prop_assert!(projected_residual(&a, &phi, &psi).unwrap() < 1e-10 * scale);
    }

    #[test]
    fn one_dim_roots_vanish_and_interlace(v in prop::collection::vec(nonzero(), 2..8)) {
        let a = prof(&v);
        let s = inner_spectrum_1d(&a, &Tolerances::default());
        prop_assert!(s.mean_zero_roots.len() < v.len());
        for z in &s.mean_zero_roots {
            let m = mean_resolvent(&a, *z).unwrap();
            let scale: f64 = v.iter().map(|x| 1.0 / (x - z.re).abs()).sum::<f64>() / v.len() as f64;
            prop_assert!(m.norm() <= 1e-9 * scale.max(1.0));
            prop_assert_eq!(z.im, 0.0);
            let lo = s.value_points[0];
            let hi = *s.value_points.last().unwrap();
            prop_assert!(z.re > lo && z.re < hi);
        }
    }
}

#[test]
fn fd_invertibility_tracks_mean_inverse_across_degenerate_set() {
    let tol = Tolerances::default();
    let n = 512;
    let mut values = Vec::new();
    for i in -10..=10 {
        let s = i as f64 * 0.05;
        let a = prof(&[1.0 + s, -1.0 + s]);
        let op = assemble_fd_1d(&a, &[0.0, 0.0], n).unwrap();
        let sv = op.min_singular_value(1e-13).unwrap();
        values.push((s, sv));
        if is_well_posed_1d(&a, &tol) {
            assert!(sv > 1e-3, "s = {s}: σ_min = {sv}");
        } else {
            assert!(sv < 1e-6 * op.norm_inf(), "s = {s}: σ_min = {sv}");
        }
    }
    let at_zero = values.iter().find(|(s, _)| *s == 0.0).unwrap().1;
    let away = values.iter().filter(|(s, _)| s.abs() >= 0.1).map(|v| v.1).fold(f64::INFINITY, f64::min);
    assert!(at_zero < 1e-6 * away);
}

/// Brackets `(lo, hi)` on the λ grid where `f` changes sign.
fn sign_brackets(grid: &[f64], f: impl Fn(f64) -> f64) -> Vec<(f64, f64)> {
    grid.windows(2)
        .filter(|w| f(w[0]).signum() != f(w[1]).signum())
        .map(|w| (w[0], w[1]))
        .collect()
}

fn bisect(mut lo: f64, mut hi: f64, f: impl Fn(f64) -> f64) -> f64 {
    let flo = f(lo).signum();
    for _ in 0..80 {
        let mid = 0.5 * (lo + hi);
        if f(mid).signum() == flo {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    0.5 * (lo + hi)
}

#[test]
fn characteristic_zeros_match_fd_crossings() {
    let n = 600;
    let grid: Vec<f64> = (0..=800).map(|i| -200.0 + 0.5 * i as f64 + 0.123).collect();
    for v in [vec![1.0, 2.0], vec![1.0, -1.0, 1.0]] {
        let a = prof(&v);
        let base = assemble_fd_1d(&a, &vec![0.0; v.len()], n).unwrap();
        let weights = base.nodal_weights(&v);
        let char_at = |lam: f64| {
            let beta: Vec<f64> = v.iter().map(|x| lam * x).collect();
            char_function(&a, &beta).unwrap().value
        };
        let fd_at = |lam: f64| {
            let op = base.with_diagonal_shift(lam, &weights).unwrap();
            // parity of the negative count flips at every simple crossing
            if op.count_below(0.0).is_multiple_of(2) { 1.0 } else { -1.0 }
        };
        let exact = sign_brackets(&grid, char_at);
        let discrete = sign_brackets(&grid, fd_at);
        assert!(!exact.is_empty());
        assert_eq!(exact.len(), discrete.len(), "{v:?}: {exact:?} vs {discrete:?}");
        for (e, d) in exact.iter().zip(&discrete) {
            let le = bisect(e.0, e.1, char_at);
            let ld = bisect(d.0 - 0.5, d.1 + 0.5, fd_at);
            assert!((le - ld).abs() <= 50.0 * (1.0 + le.abs()) / n as f64, "{v:?}: {le} vs {ld}");
        }
    }
}

#[test]
fn fd_solution_error_is_first_order_or_better() {
    let a = prof(&[1.0, -2.0, 1.0]);
    let tol = Tolerances::default();
    let psi_fn = |x: f64| (2.0 * std::f64::consts::PI * x).sin();
    let dpsi = |x: f64| 2.0 * std::f64::consts::PI * (2.0 * std::f64::consts::PI * x).cos();
    let gap = |n: usize| {
        let psi = GridFunction::from_fn(n, psi_fn).unwrap();
        let m = psi.mean();
        let psi = GridFunction::new(psi.samples().iter().map(|s| s - m).collect()).unwrap();
        let u_formula = solve_projected_1d(&a, &psi, &tol).unwrap().node_antiderivative();
        let op = assemble_fd_1d(&a, &[0.0; 3], n).unwrap();
        let rhs: Vec<f64> = op.nodes().iter().map(|&x| -dpsi(x)).collect();
        let u = op.solve(&rhs).unwrap();
        u.iter().zip(&u_formula[1..n]).map(|(x, y)| (x - y).abs()).fold(0.0, f64::max)
    };
    let (e1, e2) = (gap(300), gap(600));
    assert!(e1 * 300.0 < 1.0 && e2 < e1 / 1.9, "{e1} {e2}");
}

#[test]
fn certified_tail_modes_are_within_half_chi() {
    let tol = Tolerances::default();
    let mut rng = ChaCha8Rng::seed_from_u64(77);
    let seq = dirichlet_eigenvalues(2, 60).unwrap();
    let mut checked_profiles = 0;
    while checked_profiles < 5 {
        let slabs = rng.gen_range(2..6);
        let v: Vec<f64> = (0..slabs)
            .map(|_| if rng.gen_bool(0.5) { 1.0 } else { -1.0 } * rng.gen_range(0.3..3.0))
            .collect();
        let a = prof(&v);
        let Some(cert) = tail_certificate(&a, &tol) else { continue };
        let certified: Vec<f64> = seq.values().iter().copied().filter(|l| cert.covers(l.sqrt())).collect();
        if certified.is_empty() {
            continue;
        }
        checked_profiles += 1;
        for _ in 0..10 {
            let lambda = certified[rng.gen_range(0..certified.len())];
            let mu = lambda.sqrt();
            let value = mu * q_tilde_eval(&a, &vec![mu; slabs]).unwrap().value;
            assert!((value - cert.chi).abs() < cert.chi.abs() / 2.0, "{v:?} μ = {mu}");
        }
    }
}

#[test]
fn galerkin_sections_approach_coefficient_values() {
    let coef = GalerkinCoefficient::Laminate { alpha: prof(&[1.0, -2.0, 1.0]) };
    let e = galerkin_spectrum(&assemble_galerkin(&coef, 2, 30).unwrap());
    assert!(nearest_distance(&e, 1.0) < 1e-6);
    assert!(nearest_distance(&e, -2.0) < 1e-6);
    let g = assemble_galerkin(&coef, 2, 30).unwrap();
    assert!(g.asymmetry() < 1e-13);
}
