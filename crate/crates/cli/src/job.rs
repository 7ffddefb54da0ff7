use std::path::PathBuf;

use clap::{Parser, ValueEnum};
use laminate_spectra::oracle::galerkin::MAX_MODES;
use laminate_spectra::{LaminateProfile, Tolerances};
use serde::{Deserialize, Serialize};

use crate::CliError;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum Command {
    /// 1-D and d-dimensional well-posedness.
    Wellposed,
    /// Exact inner spectrum in one dimension.
    Spectrum1d,
    /// Discrete inner-spectrum scan on (0,1) × (0,1)^(d−1).
    Spectrumdd,
    /// Case classification, G-limit and limit inner spectrum.
    Homogenize,
    /// Inner spectrum of diag(γ, 1, …, 1).
    Gamma,
    /// Finite-difference or Galerkin cross-check.
    Oracle,
    /// q̃-criterion scan over modes and perturbations.
    Scan,
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize, ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum OutputFormat {
    #[default]
    Json,
    Csv,
    Plotdata,
}

/// Spectral analysis of divergence-form operators with sign-changing
/// laminated coefficients.
#[derive(Debug, Clone, Parser)]
#[command(name = "laminate", version, about)]
pub struct Cli {
    /// Analysis to run (may instead come from --config).
    #[arg(value_enum)]
    pub command: Option<Command>,

    /// Slab values α_0,…,α_r on equal slabs of width 1/(r+1).
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
    pub alpha: Option<Vec<f64>>,

    /// Zero-order slab values β_0,…,β_r for the oracle (default 0).
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
    pub beta: Option<Vec<f64>>,

    /// Slab widths; only equal widths are accepted.
    #[arg(long, value_delimiter = ',')]
    pub widths: Option<Vec<f64>>,

    /// Spatial dimension d.
    #[arg(long)]
    pub dim: Option<usize>,

    /// Mode cutoff per axis.
    #[arg(long = "kmax")]
    pub k_max: Option<u32>,

    /// Spectral bound A for the d-dimensional scan (default max|α_j| + 1).
    #[arg(long)]
    pub bound: Option<f64>,

    /// γ for the gamma command or a Γ Galerkin oracle.
    #[arg(long)]
    pub gamma: Option<f64>,

    /// Perturbation grid for the q̃-criterion.
    #[arg(long = "delta-grid", value_delimiter = ',')]
    pub delta_grid: Option<Vec<f64>>,

    /// Optional s-grid spacing for the sign-change cross-check.
    #[arg(long = "s-resolution")]
    pub s_resolution: Option<f64>,

    /// Galerkin modes per axis; selects the Galerkin oracle.
    #[arg(long)]
    pub modes: Option<u32>,

    /// Finite-difference cells (a multiple of the slab count).
    #[arg(long)]
    pub cells: Option<usize>,

    #[arg(long, value_enum)]
    pub format: Option<OutputFormat>,

    /// JSON job file; inline flags override its fields.
    #[arg(long)]
    pub config: Option<PathBuf>,

    /// Write the assembled oracle matrix as sparse triplets.
    #[arg(long)]
    pub dump: Option<PathBuf>,

    /// Relative zero threshold for characteristic values [default: 1e-9].
    #[arg(long = "eps-p", env = "LAMINATE_EPS_P")]
    pub eps_p: Option<f64>,

    /// Relative threshold for vanishing means [default: 1e-12].
    #[arg(long = "degeneracy-tol", env = "LAMINATE_DEGENERACY_TOL")]
    pub degeneracy_tol: Option<f64>,

    /// Relative bisection width for eigenvalues [default: 1e-12].
    #[arg(long = "eig-tol", env = "LAMINATE_EIG_TOL")]
    pub eig_tol: Option<f64>,
}

pub const DEFAULT_K_MAX: u32 = 10;
pub const DEFAULT_DELTA_GRID: [f64; 3] = [1e-3, 1e-2, 1e-1];
pub const MIN_DEFAULT_CELLS: usize = 256;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct JobSpec {
    pub command: Command,
    #[serde(default)]
    pub alpha: Option<Vec<f64>>,
    #[serde(default)]
    pub beta: Option<Vec<f64>>,
    #[serde(default)]
    pub dim: Option<usize>,
    #[serde(default)]
    pub k_max: Option<u32>,
    #[serde(default)]
    pub bound: Option<f64>,
    #[serde(default)]
    pub gamma: Option<f64>,
    #[serde(default)]
    pub delta_grid: Option<Vec<f64>>,
    #[serde(default)]
    pub s_resolution: Option<f64>,
    #[serde(default)]
    pub modes: Option<u32>,
    #[serde(default)]
    pub cells: Option<usize>,
    #[serde(default)]
    pub tolerances: Tolerances,
    #[serde(default)]
    pub format: OutputFormat,
    #[serde(default)]
    pub dump: Option<PathBuf>,
}

fn precondition(msg: impl Into<String>) -> CliError {
    CliError::Precondition(msg.into())
}

impl JobSpec {
    pub fn new(command: Command) -> Self {
        JobSpec {
            command,
            alpha: None,
            beta: None,
            dim: None,
            k_max: None,
            bound: None,
            gamma: None,
            delta_grid: None,
            s_resolution: None,
            modes: None,
            cells: None,
            tolerances: Tolerances::default(),
            format: OutputFormat::Json,
            dump: None,
        }
    }

    /// Config document first, inline flags on top.
    pub fn from_cli(cli: &Cli) -> Result<JobSpec, CliError> {
        let mut job = match &cli.config {
            Some(path) => {
                let text = std::fs::read_to_string(path)
                    .map_err(|e| CliError::Io(format!("{}: {e}", path.display())))?;
                let mut value: serde_json::Value = serde_json::from_str(&text)
                    .map_err(|e| precondition(format!("config {}: {e}", path.display())))?;
                if let (Some(cmd), Some(obj)) = (cli.command, value.as_object_mut()) {
                    obj.insert("command".into(), serde_json::to_value(cmd).expect("enum serialises"));
                }
                serde_json::from_value(value)
                    .map_err(|e| precondition(format!("config {}: {e}", path.display())))?
            }
            None => JobSpec::new(
                cli.command
                    .ok_or_else(|| precondition("a command is required (or --config)"))?,
            ),
        };
        if let Some(w) = &cli.widths {
            check_widths(w, cli.alpha.as_ref().or(job.alpha.as_ref()))?;
        }
        macro_rules! take {
            ($($field:ident),*) => {
                $(if cli.$field.is_some() { job.$field = cli.$field.clone(); })*
            };
        }
        take!(alpha, beta, dim, k_max, bound, gamma, delta_grid, s_resolution, modes, cells, dump);
        if let Some(f) = cli.format {
            job.format = f;
        }
        if let Some(v) = cli.eps_p {
            job.tolerances.eps_p = v;
        }
        if let Some(v) = cli.degeneracy_tol {
            job.tolerances.degeneracy = v;
        }
        if let Some(v) = cli.eig_tol {
            job.tolerances.eigensolver = v;
        }
        Ok(job)
    }

    pub fn profile(&self) -> Result<LaminateProfile, CliError> {
        let values = self
            .alpha
            .clone()
            .ok_or_else(|| precondition(format!("{:?} needs --alpha", self.command).to_lowercase()))?;
        LaminateProfile::with_zero_tolerance(values, self.tolerances.value_zero).map_err(CliError::from)
    }

    pub fn dim_or(&self, default: usize) -> usize {
        self.dim.unwrap_or(default)
    }

    pub fn k_max(&self) -> u32 {
        self.k_max.unwrap_or(DEFAULT_K_MAX)
    }

    pub fn delta_grid(&self) -> Vec<f64> {
        self.delta_grid.clone().unwrap_or_else(|| DEFAULT_DELTA_GRID.to_vec())
    }

    /// Checks every numeric parameter against the preconditions of the
    /// command before anything is computed.
    pub fn validate(&self) -> Result<(), CliError> {
        let t = &self.tolerances;
        for (name, v) in [
            ("eps-p", t.eps_p),
            ("degeneracy-tol", t.degeneracy),
            ("eig-tol", t.eigensolver),
            ("root residual", t.root_residual),
        ] {
            if !(v.is_finite() && v > 0.0 && v < 1.0) {
                return Err(precondition(format!("{name} must lie in (0, 1), got {v}")));
            }
        }
        if self.k_max == Some(0) {
            return Err(precondition("kmax must be at least 1"));
        }
        if let Some(g) = &self.delta_grid {
            if g.iter().any(|d| !(d.is_finite() && *d > 0.0)) {
                return Err(precondition("delta-grid values must be positive"));
            }
        }
        if self.dump.is_some() && self.command != Command::Oracle {
            return Err(precondition("--dump applies to the oracle command only"));
        }
        let needs_profile = !matches!(self.command, Command::Gamma)
            && !(self.command == Command::Oracle && self.alpha.is_none() && self.gamma.is_some());
        if needs_profile {
            self.profile()?;
        }
        match self.command {
            Command::Wellposed => {
                if self.dim == Some(0) {
                    return Err(precondition("dim must be at least 1"));
                }
            }
            Command::Spectrum1d => {
                if self.dim.is_some_and(|d| d != 1) {
                    return Err(precondition("spectrum1d is one-dimensional; drop --dim"));
                }
            }
            Command::Spectrumdd | Command::Homogenize | Command::Scan => {
                if self.dim_or(2) < 2 {
                    return Err(precondition(format!(
                        "{:?} needs dim ≥ 2",
                        self.command
                    ).to_lowercase()));
                }
                if self.command == Command::Spectrumdd {
                    let max = self.profile()?.max_abs();
                    if let Some(a) = self.bound {
                        if !(a.is_finite() && a > max) {
                            return Err(precondition(format!("bound A = {a} must exceed max|α_j| = {max}")));
                        }
                    }
                    if let Some(r) = self.s_resolution {
                        if !(r.is_finite() && r > 0.0) {
                            return Err(precondition("s-resolution must be positive"));
                        }
                    }
                }
            }
            Command::Gamma => {
                let g = self.gamma.ok_or_else(|| precondition("gamma needs --gamma"))?;
                if !(g.is_finite() && g > 0.0) {
                    return Err(precondition(format!("γ must be positive, got {g}")));
                }
                if self.dim_or(2) < 2 {
                    return Err(precondition("gamma needs dim ≥ 2"));
                }
            }
            Command::Oracle => {
                if let Some(b) = &self.beta {
                    let slabs = self.alpha.as_ref().map_or(0, Vec::len);
                    if b.len() != slabs {
                        return Err(precondition(format!(
                            "beta has {} entries but alpha has {slabs}",
                            b.len()
                        )));
                    }
                }
                if self.modes.is_some() || self.alpha.is_none() {
                    let d = self.dim_or(2);
                    if !(2..=3).contains(&d) {
                        return Err(precondition("the Galerkin oracle needs dim 2 or 3"));
                    }
                    if self.modes.is_some_and(|m| m == 0 || m > MAX_MODES) {
                        return Err(precondition(format!("modes must lie in 1..={MAX_MODES}")));
                    }
                }
                if let (Some(n), Some(a)) = (self.cells, &self.alpha) {
                    if n % a.len() != 0 || n < 2 * a.len() {
                        return Err(precondition(format!(
                            "cells = {n} must be a multiple of the slab count {} and at least twice it",
                            a.len()
                        )));
                    }
                }
            }
        }
        Ok(())
    }
}

fn check_widths(widths: &[f64], alpha: Option<&Vec<f64>>) -> Result<(), CliError> {
    if let Some(a) = alpha {
        if a.len() != widths.len() {
            return Err(precondition("widths and alpha must have the same length"));
        }
    }
    let first = widths.first().copied().unwrap_or(1.0);
    if widths.iter().any(|w| (w - first).abs() > 1e-12 * first.abs()) {
        return Err(precondition(
            "unequal slab widths are not supported: profiles use equal slabs of width 1/(r+1)",
        ));
    }
    Ok(())
}
