//! Command-line front end: parses a job (inline flags or a JSON
//! configuration), dispatches it to `laminate_spectra` and renders the
//! outcome as JSON, CSV or plot data.

mod job;
mod outcome;
mod render;

use std::ffi::OsString;
use std::io::Write;

use clap::Parser;

pub use job::{Cli, Command, JobSpec, OutputFormat};
pub use outcome::{run, Outcome};
pub use render::{render, Report, SCHEMA};

pub const EXIT_OK: i32 = 0;
pub const EXIT_IO: i32 = 1;
pub const EXIT_PRECONDITION: i32 = 2;

#[derive(Debug, Clone, PartialEq)]
pub enum CliError {
    /// A module precondition failed; the message names the condition.
    Precondition(String),
    Io(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Precondition(_) => EXIT_PRECONDITION,
            CliError::Io(_) => EXIT_IO,
        }
    }
}

impl std::fmt::Display for CliError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            CliError::Precondition(m) => write!(f, "precondition violated: {m}"),
            CliError::Io(m) => write!(f, "i/o error: {m}"),
        }
    }
}

impl std::error::Error for CliError {}

impl From<laminate_spectra::Error> for CliError {
    fn from(e: laminate_spectra::Error) -> Self {
        CliError::Precondition(e.to_string())
    }
}

/// Parses `args`, runs the job and writes the report to `out` (diagnostics
/// to `err`). Returns the process exit status.
pub fn main_with<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let text = e.render().to_string();
            let sink: &mut dyn Write = if e.use_stderr() { err } else { out };
            let _ = write!(sink, "{text}");
            return e.exit_code();
        }
    };
    match execute(&cli) {
        Ok(document) => match out.write_all(document.as_bytes()) {
            Ok(()) => EXIT_OK,
            Err(e) => {
                let _ = writeln!(err, "laminate: {}", CliError::Io(e.to_string()));
                EXIT_IO
            }
        },
        Err(e) => {
            let _ = writeln!(err, "laminate: {e}");
            e.exit_code()
        }
    }
}

fn execute(cli: &Cli) -> Result<String, CliError> {
    let job = JobSpec::from_cli(cli)?;
    job.validate()?;
    let outcome = run(&job)?;
    render(&job, &outcome)
}
