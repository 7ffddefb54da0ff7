use serde::{Deserialize, Serialize};
use serde_json::Value;

use crate::job::{JobSpec, OutputFormat};
use crate::outcome::{p_alpha_curve, Outcome};
use crate::CliError;

pub const SCHEMA: &str = "laminate-spectra/1";

/// Top-level JSON document. `result` is kept untyped so the schema survives
/// additions; retype it with [`Outcome::from_value`].
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Report {
    pub schema: String,
    pub job: JobSpec,
    pub result: Value,
}

pub fn render(job: &JobSpec, outcome: &Outcome) -> Result<String, CliError> {
    let result = serde_json::to_value(outcome).map_err(|e| CliError::Io(e.to_string()))?;
    match job.format {
        OutputFormat::Json => {
            let report = Report { schema: SCHEMA.to_string(), job: job.clone(), result };
            let v = serde_json::to_value(&report).map_err(|e| CliError::Io(e.to_string()))?;
            let mut s = String::new();
            emit(&v, 0, &mut s);
            s.push('\n');
            Ok(s)
        }
        OutputFormat::Csv => Ok(csv(outcome)),
        OutputFormat::Plotdata => Ok(plotdata(job, outcome)),
    }
}

/// Shortest representation that round-trips: 17 significant digits.
fn number(x: f64) -> String {
    if x.is_finite() {
        format!("{x:.16e}")
    } else {
        "null".to_string()
    }
}

/// Pretty JSON with sorted keys (serde_json's default map is ordered) and a
/// fixed float format, so equal inputs give byte-identical output.
fn emit(v: &Value, depth: usize, out: &mut String) {
    let pad = |d: usize| "  ".repeat(d);
    match v {
        Value::Null => out.push_str("null"),
        Value::Bool(b) => out.push_str(if *b { "true" } else { "false" }),
        Value::Number(n) => match (n.as_i64(), n.as_u64()) {
            (Some(i), _) => out.push_str(&i.to_string()),
            (_, Some(u)) => out.push_str(&u.to_string()),
            _ => out.push_str(&number(n.as_f64().unwrap_or(f64::NAN))),
        },
        Value::String(s) => out.push_str(&Value::String(s.clone()).to_string()),
        Value::Array(a) if a.is_empty() => out.push_str("[]"),
        Value::Object(m) if m.is_empty() => out.push_str("{}"),
        Value::Array(a) => {
            out.push_str("[\n");
            for (i, x) in a.iter().enumerate() {
                out.push_str(&pad(depth + 1));
                emit(x, depth + 1, out);
                out.push_str(if i + 1 < a.len() { ",\n" } else { "\n" });
            }
            out.push_str(&pad(depth));
            out.push(']');
        }
        Value::Object(m) => {
            out.push_str("{\n");
            for (i, (k, x)) in m.iter().enumerate() {
                out.push_str(&pad(depth + 1));
                out.push_str(&Value::String(k.clone()).to_string());
                out.push_str(": ");
                emit(x, depth + 1, out);
                out.push_str(if i + 1 < m.len() { ",\n" } else { "\n" });
            }
            out.push_str(&pad(depth));
            out.push('}');
        }
    }
}

fn table(header: &[&str], rows: Vec<Vec<String>>) -> String {
    let mut s = header.join(",");
    s.push('\n');
    for r in rows {
        debug_assert_eq!(r.len(), header.len());
        s.push_str(&r.join(","));
        s.push('\n');
    }
    s
}

fn row(kind: &str, index: usize, value: f64, extra: String) -> Vec<String> {
    vec![kind.to_string(), index.to_string(), number(value), extra]
}

/// One row per reported number: `kind,index,value,extra`.
fn csv(outcome: &Outcome) -> String {
    let mut rows = Vec::new();
    let mut push_all = |kind: &str, xs: &[f64]| {
        for (i, &x) in xs.iter().enumerate() {
            rows.push(row(kind, i, x, String::new()));
        }
    };
    match outcome {
        Outcome::Wellposed(r) => {
            push_all("mean", &[r.mean]);
            push_all("mean_inv", &[r.mean_inv]);
            push_all("well_posed_1d", &[f64::from(u8::from(r.well_posed_1d))]);
            if let Some(dd) = &r.dd {
                push_all("well_posed_dd", &[f64::from(u8::from(dd.well_posed))]);
                push_all("t0", &[dd.t0]);
                push_all("p_alpha_root", &dd.p_alpha_roots);
            }
        }
        Outcome::Spectrum1d(r) => {
            push_all("value_point", &r.value_points);
            push_all("mean_zero_root", &r.mean_zero_roots);
            for (i, z) in r.complex_roots.iter().enumerate() {
                rows.push(row("complex_root", i, z[0], number(z[1])));
            }
        }
        Outcome::Spectrumdd(r) => {
            push_all("value_point", &r.report.value_points);
            push_all("mean_zero_shift", &r.report.mean_zero_shifts);
            for (i, root) in r.report.scan_roots.iter().enumerate() {
                let k = root.k_index.map(|k| k.to_string()).unwrap_or_default();
                rows.push(row("scan_root", i, root.s, k));
            }
        }
        Outcome::Homogenize(r) => {
            push_all("mean", &[r.mean]);
            push_all("mean_inv", &[r.mean_inv]);
            if let Some(s) = &r.limit_spectrum {
                push_all("limit_point", &s.values());
            }
            if let Some(s) = &r.gamma_route {
                push_all("gamma_route_point", &s.values());
            }
        }
        Outcome::Gamma(r) => push_all("limit_point", &r.spectrum.values()),
        Outcome::Oracle(r) => {
            if let Some(fd) = &r.fd {
                push_all("fd_min_singular_value", &[fd.min_singular_value]);
                push_all("fd_eigenvalue", &fd.smallest_eigenvalues);
            }
            if let Some(g) = &r.galerkin {
                push_all("galerkin_eigenvalue", &g.eigenvalues);
            }
        }
        Outcome::Scan(r) => {
            push_all("chi", &[r.chi]);
            push_all("p_alpha_root", &r.p_alpha_roots);
            if let Some(t) = &r.tail {
                push_all("tail_mu_star", &[t.mu_star]);
            }
        }
    }
    table(&["kind", "index", "value", "extra"], rows)
}

/// Gnuplot-style blocks: `# label`, then `x y` lines, blank-line separated.
fn plotdata(job: &JobSpec, outcome: &Outcome) -> String {
    let mut blocks: Vec<(String, Vec<(f64, f64)>)> = Vec::new();
    let points = |xs: &[f64]| xs.iter().map(|&x| (x, 0.0)).collect::<Vec<_>>();
    match outcome {
        Outcome::Wellposed(_) | Outcome::Scan(_) => blocks.push(("p_alpha".into(), p_alpha_curve(job))),
        Outcome::Spectrum1d(r) => {
            blocks.push(("value_points".into(), points(&r.value_points)));
            blocks.push(("mean_zero_roots".into(), points(&r.mean_zero_roots)));
        }
        Outcome::Spectrumdd(r) => {
            blocks.push(("value_points".into(), points(&r.report.value_points)));
            blocks.push((
                "scan_roots".into(),
                r.report.scan_roots.iter().map(|x| (x.s, x.t)).collect(),
            ));
        }
        Outcome::Homogenize(r) => {
            if let Some(s) = &r.limit_spectrum {
                blocks.push(("limit_points".into(), points(&s.values())));
            }
        }
        Outcome::Gamma(r) => blocks.push(("limit_points".into(), points(&r.spectrum.values()))),
        Outcome::Oracle(r) => {
            if let Some(fd) = &r.fd {
                blocks.push(("fd_eigenvalues".into(), points(&fd.smallest_eigenvalues)));
            }
            if let Some(g) = &r.galerkin {
                blocks.push(("galerkin_eigenvalues".into(), points(&g.eigenvalues)));
            }
        }
    }
    let mut s = String::new();
    for (i, (label, pts)) in blocks.iter().enumerate() {
        if i > 0 {
            s.push('\n');
        }
        s.push_str(&format!("# {label}\n"));
        for (x, y) in pts {
            s.push_str(&format!("{} {}\n", number(*x), number(*y)));
        }
    }
    s
}
