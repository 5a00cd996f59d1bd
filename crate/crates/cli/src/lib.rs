// SPDX-License-Identifier: Apache-2.0

//! `rfqlink` command-line front end.
//!
//! [`run`] parses arguments, executes one subcommand and returns the process
//! exit code: 0 on success, 1 for unreadable or malformed input (including
//! usage errors), 2 when the analysis itself fails.

use std::ffi::OsString;
use std::io::Write;
use std::path::PathBuf;

use clap::{Parser, Subcommand};
use serde_json::Value;
use thiserror::Error;

pub mod commands;
pub mod input;
pub mod report;

/// Failure of one invocation, split by exit code.
#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum CliError {
    /// Unreadable or malformed input.
    #[error("{0}")]
    Input(String),
    /// The analysis could not be carried out on valid input.
    #[error("{0}")]
    Analysis(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Input(_) => 1,
            CliError::Analysis(_) => 2,
        }
    }
}

pub use report::AnalysisReport;

/// Environment variable overriding the 290 K noise reference temperature.
pub const T0_ENV: &str = "RFQLINK_T0";

#[derive(Debug, Parser)]
#[command(name = "rfqlink", version, about = "Two-port, noise and link-budget analysis for mm-wave amplifiers")]
pub struct Cli {
    /// Write a JSON analysis report to PATH
    #[arg(long, global = true, value_name = "PATH")]
    pub json: Option<PathBuf>,

    /// Write the primary output to PATH instead of stdout
    #[arg(short, long, global = true, value_name = "PATH")]
    pub output: Option<PathBuf>,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Convert S-parameters to Z, Y, ABCD or T (CSV output)
    Convert {
        input: PathBuf,
        /// Target representation: s, z, y, abcd or t
        #[arg(long)]
        to: rfqlink_core::RepresentationKind,
    },
    /// Cascade two networks, first followed by second (Touchstone output)
    Cascade {
        first: PathBuf,
        second: PathBuf,
        /// Interpolate both onto their common frequency grid
        #[arg(long)]
        resample: bool,
    },
    /// Remove fixtures from a measurement (Touchstone output)
    #[command(group(clap::ArgGroup::new("fixture").required(true).multiple(true).args(["left", "right"])))]
    Deembed {
        measured: PathBuf,
        /// Fixture on the input side
        #[arg(long, value_name = "FIXTURE")]
        left: Option<PathBuf>,
        /// Fixture on the output side
        #[arg(long, value_name = "FIXTURE")]
        right: Option<PathBuf>,
    },
    /// Cold-source noise figure extraction (CSV output)
    NfExtract {
        /// Cascade gain, columns freq_hz,gain_db
        #[arg(long)]
        casc_gain: PathBuf,
        /// Cascade output noise density, columns freq_hz,w_per_hz
        #[arg(long)]
        casc_onpd: PathBuf,
        /// Downconverter gain
        #[arg(long)]
        dc_gain: PathBuf,
        /// Downconverter output noise density
        #[arg(long)]
        dc_onpd: PathBuf,
        /// Physical temperature of the input termination, K
        #[arg(long, default_value_t = 290.0)]
        tsource: f64,
    },
    /// Peak gain and band edges of a gain curve (columns freq_hz,gain_db)
    Band {
        input: PathBuf,
        /// Drop from the peak defining the band edges, dB
        #[arg(long, default_value_t = 3.0)]
        delta: f64,
    },
    /// Input-referred 1 dB compression point (columns pin_dbm,gt_db)
    P1db { input: PathBuf },
    /// Inductance, Q and coupling of a transformer; optional cryogenic comparison
    Passives {
        input: PathBuf,
        /// Cryogenic measurement to compare against INPUT
        #[arg(long, value_name = "CT")]
        compare: Option<PathBuf>,
    },
    /// Back-gate voltage for a target current density
    Bias {
        input: PathBuf,
        /// Target drain current density, mA/um
        #[arg(long)]
        j: f64,
        /// Supply voltage, V (with --pdc, reports the supply current)
        #[arg(long, requires = "pdc")]
        vdd: Option<f64>,
        /// DC power, mW
        #[arg(long, requires = "vdd")]
        pdc: Option<f64>,
    },
    /// Check an amplifier card against a qubit drive specification
    Budget {
        #[arg(long)]
        card: PathBuf,
        #[arg(long)]
        spec: PathBuf,
        /// Gain curve (freq_hz,gain_db); gain is then read at the Larmor frequency
        #[arg(long, value_name = "CSV")]
        gain_curve: Option<PathBuf>,
    },
}

impl Command {
    fn name(&self) -> &'static str {
        match self {
            Command::Convert { .. } => "convert",
            Command::Cascade { .. } => "cascade",
            Command::Deembed { .. } => "deembed",
            Command::NfExtract { .. } => "nf-extract",
            Command::Band { .. } => "band",
            Command::P1db { .. } => "p1db",
            Command::Passives { .. } => "passives",
            Command::Bias { .. } => "bias",
            Command::Budget { .. } => "budget",
        }
    }
}

/// Result of a successful subcommand before anything is written.
#[derive(Debug, Default)]
pub struct Outcome {
    /// Primary output (CSV, Touchstone or `key = value` text).
    pub text: String,
    pub results: Value,
    pub warnings: Vec<String>,
}

/// Runs with explicit argument list and streams. Returns the exit code.
pub fn run<I, T>(args: I, stdout: &mut dyn Write, stderr: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let args: Vec<OsString> = args.into_iter().map(Into::into).collect();
    let cli = match Cli::try_parse_from(&args) {
        Ok(c) => c,
        Err(e) => {
            use clap::error::ErrorKind;
            return match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => {
                    let _ = write!(stdout, "{e}");
                    0
                }
                _ => {
                    let _ = write!(stderr, "{e}");
                    1
                }
            };
        }
    };
    let arguments = args
        .iter()
        .skip(1)
        .map(|a| a.to_string_lossy().into_owned())
        .collect();
    match execute(&cli, arguments, stdout) {
        Ok(warnings) => {
            for w in warnings {
                let _ = writeln!(stderr, "warning: {w}");
            }
            0
        }
        Err(e) => {
            let _ = writeln!(stderr, "error: {e}");
            e.exit_code()
        }
    }
}

fn t0_from_env() -> Result<f64, CliError> {
    match std::env::var(T0_ENV) {
        Err(_) => Ok(rfqlink_core::constants::T0),
        Ok(v) => v
            .trim()
            .parse::<f64>()
            .ok()
            .filter(|t| t.is_finite() && *t > 0.0)
            .ok_or_else(|| CliError::Input(format!("{T0_ENV} must be a positive temperature, got '{v}'"))),
    }
}

fn execute(cli: &Cli, arguments: Vec<String>, stdout: &mut dyn Write) -> Result<Vec<String>, CliError> {
    let mut inputs = input::Inputs::default();
    let t0 = t0_from_env()?;
    let out = commands::dispatch(&cli.command, &mut inputs, t0)?;

    let report = match &cli.json {
        Some(_) => Some(
            AnalysisReport {
                tool_version: env!("CARGO_PKG_VERSION").to_string(),
                timestamp: chrono::Utc::now().to_rfc3339_opts(chrono::SecondsFormat::Secs, true),
                command: cli.command.name().to_string(),
                arguments,
                inputs: inputs.records,
                results: out.results,
                warnings: out.warnings.clone(),
            }
            .to_json()?,
        ),
        None => None,
    };

    match &cli.output {
        Some(path) => report::write_atomic(path, &out.text)?,
        None => stdout
            .write_all(out.text.as_bytes())
            .map_err(|e| CliError::Input(format!("stdout: {e}")))?,
    }
    if let (Some(path), Some(json)) = (&cli.json, report) {
        report::write_atomic(path, &json)?;
    }
    Ok(out.warnings)
}
