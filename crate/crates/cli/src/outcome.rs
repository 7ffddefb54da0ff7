use std::fs::File;
use std::io::BufWriter;

use laminate_spectra::homogenisation::{
    classify, laminate_gamma_route_spectrum, limit_coefficient, limit_inner_spectrum, gamma_inner_spectrum,
    HomogenisationCase, HomogenisedLimit, LimitSpectrum,
};
use laminate_spectra::laminate::{chi, p_alpha};
use laminate_spectra::multi_dim::{
    dirichlet_eigenvalues, inner_spectrum_dd, p_alpha_roots, qcrit_check, tail_certificate, well_posed_dd,
    KCutoffPolicy, QCriterionResult, SpectrumReportDD, TailCertificate,
};
use laminate_spectra::one_dim::{g_limit_1d, inner_spectrum_1d, is_well_posed_1d, mean, mean_inv};
use laminate_spectra::oracle::galerkin::{nearest_distance, stability_filter, MAX_MODES};
use laminate_spectra::oracle::{
    assemble_fd_1d, assemble_galerkin, galerkin_spectrum, write_triplets, GalerkinCoefficient,
};
use laminate_spectra::Error;
use serde::{Deserialize, Serialize};

use crate::job::{Command, JobSpec, MIN_DEFAULT_CELLS};
use crate::CliError;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct WellposedDD {
    pub dim: usize,
    pub k_max: u32,
    /// `tanh(√λ_min h)`.
    pub t0: f64,
    pub p_alpha_roots: Vec<f64>,
    pub well_posed: bool,
    pub qcrit: QCriterionResult,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct WellposedResult {
    pub mean: f64,
    pub mean_inv: f64,
    pub well_posed_1d: bool,
    pub limit_1d: HomogenisedLimit,
    pub dd: Option<WellposedDD>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Spectrum1dResult {
    pub values: Vec<f64>,
    pub value_points: Vec<f64>,
    /// Real roots of `Σ 1/(α_j − λ) = 0`.
    pub mean_zero_roots: Vec<f64>,
    /// Non-real roots as `[re, im]`.
    pub complex_roots: Vec<[f64; 2]>,
    pub tolerance: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SpectrumddResult {
    pub dim: usize,
    pub k_max: u32,
    pub report: SpectrumReportDD,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HomogenizeResult {
    pub case: HomogenisationCase,
    pub mean: f64,
    pub mean_inv: f64,
    pub limit: HomogenisedLimit,
    pub limit_spectrum: Option<LimitSpectrum>,
    pub withheld: Option<String>,
    /// Case c only: spectrum of the classical limit as `𝔪(α)·diag(γ,1,…)`.
    pub gamma_route: Option<LimitSpectrum>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GammaResult {
    pub gamma: f64,
    pub dim: usize,
    pub spectrum: LimitSpectrum,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FdSummary {
    pub cells: usize,
    pub well_posed_1d: bool,
    pub min_singular_value: f64,
    pub smallest_eigenvalues: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GalerkinSummary {
    pub dim: usize,
    pub modes: u32,
    pub asymmetry: f64,
    pub eigenvalues: Vec<f64>,
    /// `(value, distance to nearest eigenvalue)` for each coefficient value.
    pub nearest_to_values: Vec<[f64; 2]>,
    /// Fraction of eigenvalues moving less than `1e-6` under `M → M + 5`;
    /// a heuristic pollution guard, absent when `M + 5` exceeds the cap.
    pub stable_fraction: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OracleResult {
    pub fd: Option<FdSummary>,
    pub galerkin: Option<GalerkinSummary>,
    pub dump: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScanResult {
    pub dim: usize,
    pub k_max: u32,
    pub chi: f64,
    pub tail: Option<TailCertificate>,
    pub sequence: Vec<f64>,
    pub p_alpha_roots: Vec<f64>,
    pub qcrit: QCriterionResult,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Outcome {
    Wellposed(WellposedResult),
    Spectrum1d(Spectrum1dResult),
    Spectrumdd(SpectrumddResult),
    Homogenize(HomogenizeResult),
    Gamma(GammaResult),
    Oracle(OracleResult),
    Scan(ScanResult),
}

impl Outcome {
    /// Re-types a `result` document for the given command.
    pub fn from_value(command: Command, value: serde_json::Value) -> serde_json::Result<Outcome> {
        Ok(match command {
            Command::Wellposed => Outcome::Wellposed(serde_json::from_value(value)?),
            Command::Spectrum1d => Outcome::Spectrum1d(serde_json::from_value(value)?),
            Command::Spectrumdd => Outcome::Spectrumdd(serde_json::from_value(value)?),
            Command::Homogenize => Outcome::Homogenize(serde_json::from_value(value)?),
            Command::Gamma => Outcome::Gamma(serde_json::from_value(value)?),
            Command::Oracle => Outcome::Oracle(serde_json::from_value(value)?),
            Command::Scan => Outcome::Scan(serde_json::from_value(value)?),
        })
    }
}

pub fn run(job: &JobSpec) -> Result<Outcome, CliError> {
    match job.command {
        Command::Wellposed => wellposed(job).map(Outcome::Wellposed),
        Command::Spectrum1d => spectrum1d(job).map(Outcome::Spectrum1d),
        Command::Spectrumdd => spectrumdd(job).map(Outcome::Spectrumdd),
        Command::Homogenize => homogenize(job).map(Outcome::Homogenize),
        Command::Gamma => gamma(job).map(Outcome::Gamma),
        Command::Oracle => oracle(job).map(Outcome::Oracle),
        Command::Scan => scan(job).map(Outcome::Scan),
    }
}

fn wellposed(job: &JobSpec) -> Result<WellposedResult, CliError> {
    let alpha = job.profile()?;
    let tol = &job.tolerances;
    let dim = job.dim_or(1);
    let dd = if dim >= 2 {
        let seq = dirichlet_eigenvalues(dim - 1, job.k_max())?;
        let well_posed = well_posed_dd(&alpha, &seq, tol)?;
        let t0 = (seq.min().sqrt() * alpha.width()).tanh();
        Some(WellposedDD {
            dim,
            k_max: job.k_max(),
            t0,
            p_alpha_roots: p_alpha_roots(&alpha, t0, 1.0, tol).unwrap_or_default(),
            well_posed,
            qcrit: qcrit_check(&alpha, &seq, &job.delta_grid(), KCutoffPolicy::Auto, tol)?,
        })
    } else {
        None
    };
    Ok(WellposedResult {
        mean: mean(&alpha),
        mean_inv: mean_inv(&alpha),
        well_posed_1d: is_well_posed_1d(&alpha, tol),
        limit_1d: g_limit_1d(&alpha, tol),
        dd,
    })
}

fn spectrum1d(job: &JobSpec) -> Result<Spectrum1dResult, CliError> {
    let alpha = job.profile()?;
    let rep = inner_spectrum_1d(&alpha, &job.tolerances);
    let (real, complex): (Vec<&num_complex::Complex64>, Vec<_>) = rep.mean_zero_roots.iter().partition(|z| z.im == 0.0);
    Ok(Spectrum1dResult {
        values: alpha.values().to_vec(),
        value_points: rep.value_points,
        mean_zero_roots: real.into_iter().map(|z| z.re).collect(),
        complex_roots: complex.into_iter().map(|z| [z.re, z.im]).collect(),
        tolerance: rep.tolerance,
    })
}

fn spectrumdd(job: &JobSpec) -> Result<SpectrumddResult, CliError> {
    let alpha = job.profile()?;
    let dim = job.dim_or(2);
    let seq = dirichlet_eigenvalues(dim - 1, job.k_max())?;
    let bound = job.bound.unwrap_or(alpha.max_abs() + 1.0);
    let report = inner_spectrum_dd(&alpha, &seq, bound, job.s_resolution, &job.tolerances)?;
    Ok(SpectrumddResult { dim, k_max: job.k_max(), report })
}

fn homogenize(job: &JobSpec) -> Result<HomogenizeResult, CliError> {
    let alpha = job.profile()?;
    let tol = &job.tolerances;
    let dim = job.dim_or(2);
    let case = classify(&alpha, tol);
    let (limit_spectrum, withheld) = match limit_inner_spectrum(&alpha, dim, job.k_max(), tol) {
        Ok(s) => (Some(s), None),
        Err(Error::FormulaWithheld(m)) => (None, Some(m)),
        Err(e) => return Err(e.into()),
    };
    let gamma_route = if case == HomogenisationCase::DiagonalC && withheld.is_none() {
        Some(laminate_gamma_route_spectrum(&alpha, dim, job.k_max(), tol)?)
    } else {
        None
    };
    Ok(HomogenizeResult {
        case,
        mean: mean(&alpha),
        mean_inv: mean_inv(&alpha),
        limit: limit_coefficient(&alpha, dim, tol)?,
        limit_spectrum,
        withheld,
        gamma_route,
    })
}

fn gamma(job: &JobSpec) -> Result<GammaResult, CliError> {
    let g = job.gamma.expect("validated");
    let dim = job.dim_or(2);
    Ok(GammaResult { gamma: g, dim, spectrum: gamma_inner_spectrum(g, dim, job.k_max())? })
}

fn dump_to(path: &std::path::Path, rows: usize, entries: &[(usize, usize, f64)]) -> Result<String, CliError> {
    let io = |e: std::io::Error| CliError::Io(format!("{}: {e}", path.display()));
    let mut w = BufWriter::new(File::create(path).map_err(io)?);
    write_triplets(&mut w, rows, rows, entries).map_err(io)?;
    Ok(path.display().to_string())
}

fn oracle(job: &JobSpec) -> Result<OracleResult, CliError> {
    let tol = &job.tolerances;
    let mut dump = None;
    let galerkin_coef = match (&job.alpha, job.gamma, job.modes) {
        (_, Some(gamma), _) if job.alpha.is_none() => Some(GalerkinCoefficient::Gamma { gamma }),
        (Some(_), _, Some(_)) => Some(GalerkinCoefficient::Laminate { alpha: job.profile()? }),
        _ => None,
    };
    let galerkin = match galerkin_coef {
        None => None,
        Some(coef) => {
            let dim = job.dim_or(2);
            let modes = job.modes.unwrap_or(20);
            let g = assemble_galerkin(&coef, dim, modes)?;
            let eigenvalues = galerkin_spectrum(&g);
            let values: Vec<f64> = match &coef {
                GalerkinCoefficient::Laminate { alpha } => {
                    let mut v = alpha.values().to_vec();
                    v.sort_by(f64::total_cmp);
                    v.dedup();
                    v
                }
                GalerkinCoefficient::Gamma { gamma } => vec![gamma.min(1.0), gamma.max(1.0)],
            };
            let stable_fraction = if modes + 5 <= MAX_MODES {
                let tags = stability_filter(&coef, dim, modes, 1e-6)?;
                Some(tags.iter().filter(|t| t.stable).count() as f64 / tags.len() as f64)
            } else {
                None
            };
            if let Some(path) = &job.dump {
                dump = Some(dump_to(path, g.size(), &g.triplets())?);
            }
            Some(GalerkinSummary {
                dim,
                modes,
                asymmetry: g.asymmetry(),
                nearest_to_values: values.iter().map(|&v| [v, nearest_distance(&eigenvalues, v)]).collect(),
                eigenvalues,
                stable_fraction,
            })
        }
    };
    let fd = match (&job.alpha, galerkin.is_some()) {
        (Some(_), false) => {
            let alpha = job.profile()?;
            let slabs = alpha.slab_count();
            let cells = job.cells.unwrap_or(MIN_DEFAULT_CELLS.div_ceil(slabs) * slabs);
            let beta = job.beta.clone().unwrap_or_else(|| vec![0.0; slabs]);
            let op = assemble_fd_1d(&alpha, &beta, cells)?;
            if let Some(path) = &job.dump {
                dump = Some(dump_to(path, op.dim(), &op.triplets())?);
            }
            Some(FdSummary {
                cells,
                well_posed_1d: is_well_posed_1d(&alpha, tol),
                min_singular_value: op.min_singular_value(tol.eigensolver)?,
                smallest_eigenvalues: op.smallest_eigs(5, tol.eigensolver)?,
            })
        }
        _ => None,
    };
    Ok(OracleResult { fd, galerkin, dump })
}

fn scan(job: &JobSpec) -> Result<ScanResult, CliError> {
    let alpha = job.profile()?;
    let tol = &job.tolerances;
    let dim = job.dim_or(2);
    let seq = dirichlet_eigenvalues(dim - 1, job.k_max())?;
    Ok(ScanResult {
        dim,
        k_max: job.k_max(),
        chi: chi(&alpha),
        tail: tail_certificate(&alpha, tol),
        sequence: seq.values().to_vec(),
        p_alpha_roots: p_alpha_roots(&alpha, 0.0, 1.0, tol).unwrap_or_default(),
        qcrit: qcrit_check(&alpha, &seq, &job.delta_grid(), KCutoffPolicy::Auto, tol)?,
    })
}

/// `(t, p_α(t))` on a uniform grid of `(0, 1]`.
pub(crate) fn p_alpha_curve(job: &JobSpec) -> Vec<(f64, f64)> {
    let Ok(alpha) = job.profile() else { return Vec::new() };
    (1..=200)
        .map(|i| {
            let t = i as f64 / 200.0;
            (t, p_alpha(&alpha, t).unwrap_or(f64::NAN))
        })
        .collect()
}
