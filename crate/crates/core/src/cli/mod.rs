//! Command-line front end.

pub mod commands;
pub mod config;
pub mod output;

use std::io::Write;
use std::path::PathBuf;

use clap::{Parser, Subcommand, ValueEnum};
use serde::Serialize;

use crate::error::{Error, Result};

pub use config::{load, Format, LoadedConfig, RunConfig, SimMode, SCHEMA_VERSION};
pub use output::Report;

#[derive(Debug, Parser)]
#[command(
    name = "oqs",
    version,
    about = "Open quantum system dynamics from bath correlators"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,

    /// TOML run configuration.
    #[arg(long, global = true, value_name = "PATH")]
    pub config: Option<PathBuf>,

    /// Override a configuration value, e.g. `--set bath.beta=inf`.
    #[arg(long = "set", global = true, value_name = "KEY=VALUE")]
    pub overrides: Vec<String>,

    /// Write the report here instead of standard output.
    #[arg(long, global = true, value_name = "PATH")]
    pub output: Option<PathBuf>,

    #[arg(long, global = true, value_enum)]
    pub format: Option<Format>,

    /// Secular (rotating-wave) selection of kernel elements.
    #[arg(long, global = true, value_enum)]
    pub rwa: Option<Switch>,

    #[arg(long, global = true, value_enum)]
    pub mode: Option<SimMode>,

    /// Longest operator string for `wick-check`.
    #[arg(long, global = true)]
    pub max_n: Option<usize>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Subcommand)]
pub enum Command {
    /// Propagate the reduced density matrix.
    Simulate,
    /// Tabulate the kernel, shift and dissipator over a frequency grid.
    KernelScan,
    /// Locate the poles of the transmission matrix.
    Resonances,
    /// Compare Wick contractions with a truncated Fock-space computation.
    WickCheck,
    /// Qubit rate table and closed-form versus integrated dynamics.
    QubitDemo,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Switch {
    On,
    Off,
}

/// Exit status for an error: 1 for input problems, 2 for numerical failures.
pub fn exit_code(err: &Error) -> i32 {
    if err.is_numerical() || matches!(err, Error::Limit(_)) {
        2
    } else {
        1
    }
}

#[derive(Serialize)]
struct ErrorRecord<'a> {
    error: &'a str,
    message: String,
    exit_code: i32,
}

/// Machine-readable one-line error record.
pub fn error_record(err: &Error) -> String {
    serde_json::to_string(&ErrorRecord {
        error: err.kind(),
        message: err.to_string(),
        exit_code: exit_code(err),
    })
    .expect("error record serializes")
}

impl Cli {
    /// Overrides implied by the dedicated flags, applied after `--set`.
    fn flag_overrides(&self) -> Vec<String> {
        let mut out = self.overrides.clone();
        if let Some(f) = self.format {
            out.push(format!("output.format=\"{}\"", enum_name(f)));
        }
        if let Some(r) = self.rwa {
            out.push(format!("simulation.rwa={}", r == Switch::On));
        }
        if let Some(m) = self.mode {
            out.push(format!("simulation.mode=\"{}\"", enum_name(m)));
        }
        if let Some(n) = self.max_n {
            out.push(format!("wick.max_n={n}"));
        }
        out
    }
}

fn enum_name<T: ValueEnum>(v: T) -> String {
    v.to_possible_value()
        .expect("visible variant")
        .get_name()
        .to_string()
}

/// Finished command: rendered report text and warnings for standard error.
pub struct RunOutput {
    pub text: String,
    pub destination: Option<PathBuf>,
    pub warnings: Vec<String>,
}

/// Loads the configuration and runs the subcommand without touching the
/// filesystem beyond reading the config.
pub fn execute(cli: &Cli) -> Result<RunOutput> {
    let text = match &cli.config {
        Some(path) => std::fs::read_to_string(path)
            .map_err(|e| Error::Config(format!("cannot read {}: {e}", path.display())))?,
        None => format!("schema_version = {SCHEMA_VERSION}\n"),
    };
    let loaded = load(&text, &cli.flag_overrides())?;
    let rc = &loaded.config;
    let outcome = match cli.command {
        Command::Simulate => commands::simulate(rc)?,
        Command::KernelScan => commands::kernel_scan(rc)?,
        Command::Resonances => commands::resonances(rc)?,
        Command::WickCheck => commands::wick_check(rc)?,
        Command::QubitDemo => commands::qubit_demo(rc)?,
    };
    Ok(RunOutput {
        text: outcome.report.render(rc.output.format, &loaded.sha256),
        destination: cli.output.clone().or_else(|| rc.output.path.clone()),
        warnings: outcome.warnings,
    })
}

/// Runs the CLI and returns the process exit code.
pub fn main_with_args<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return code;
        }
    };
    match execute(&cli).and_then(|out| {
        for w in &out.warnings {
            eprintln!("warning: {w}");
        }
        match &out.destination {
            Some(path) => std::fs::write(path, &out.text)?,
            None => std::io::stdout().write_all(out.text.as_bytes())?,
        }
        Ok(())
    }) {
        Ok(()) => 0,
        Err(e) => {
            eprintln!("{}", error_record(&e));
            exit_code(&e)
        }
    }
}
