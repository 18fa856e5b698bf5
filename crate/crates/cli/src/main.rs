//! Dataset generator for squeezed-photon qubit theory.
//!
//! Exit codes: 0 success, 2 configuration error, 3 numerical failure. Errors
//! are printed to stderr as one JSON object.

// `!(x > 0.0)` is used on purpose so that NaN fails validation.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

mod commands;
mod config;
mod error;
mod output;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use crate::config::RunConfig;
use crate::error::CliError;
use crate::output::Output;

#[derive(Debug, Parser)]
#[command(name = "sqbo", version, about = "Squeezed-photon qubit datasets (CSV/JSON)")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Signal gain and phase over probe frequency and pump amplitude.
    GainMap(RunArgs),
    /// Peak gain and 3 dB bandwidth along pump sweeps.
    Gbw(RunArgs),
    /// Qubit frequency shift and dephasing versus pump amplitude.
    QubitResponse(RunArgs),
    /// Analytic, fitted and oracle dispersive strength versus pump amplitude.
    ChiSweep(RunArgs),
    /// Closed forms against the Lindblad oracle.
    OracleCompare(RunArgs),
}

#[derive(Debug, Args)]
struct RunArgs {
    /// Parameter file (key = value lines, or JSON).
    #[arg(long)]
    config: PathBuf,
    /// Output directory, created if missing.
    #[arg(long, default_value = ".")]
    out: PathBuf,
    /// Add Lindblad-oracle columns.
    #[arg(long)]
    oracle: bool,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Omit the timestamp metadata line.
    #[arg(long)]
    no_timestamp: bool,
}

fn run(cli: Cli) -> Result<Vec<PathBuf>, CliError> {
    let (name, args) = match &cli.command {
        Command::GainMap(a) => ("gain_map", a),
        Command::Gbw(a) => ("gbw", a),
        Command::QubitResponse(a) => ("qubit_response", a),
        Command::ChiSweep(a) => ("chi_sweep", a),
        Command::OracleCompare(a) => ("oracle_compare", a),
    };
    let cfg = RunConfig::load(&args.config)?;
    let mut out = Output::new(&args.out, name, &cfg, args.seed, !args.no_timestamp)?;
    let result = match cli.command {
        Command::GainMap(_) => commands::gain_map(&cfg, &mut out),
        Command::Gbw(_) => commands::gbw(&cfg, &mut out),
        Command::QubitResponse(_) => commands::qubit_response(&cfg, &mut out, args.oracle),
        Command::ChiSweep(_) => commands::chi_sweep(&cfg, &mut out, args.seed, args.oracle),
        Command::OracleCompare(_) => commands::oracle_compare(&cfg, &mut out),
    };
    // The sidecar log is written even when the command fails.
    let log = out.finish()?;
    let mut files = result?;
    files.extend(log);
    Ok(files)
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) if matches!(e.kind(), clap::error::ErrorKind::DisplayHelp | clap::error::ErrorKind::DisplayVersion) => {
            print!("{e}");
            return ExitCode::SUCCESS;
        }
        Err(e) => {
            let err = CliError::Config(e.to_string().trim().to_string());
            eprintln!("{}", err.to_json());
            return ExitCode::from(err.exit_code() as u8);
        }
    };
    match run(cli) {
        Ok(files) => {
            for f in files {
                println!("{}", f.display());
            }
            ExitCode::SUCCESS
        }
        Err(err) => {
            eprintln!("{}", err.to_json());
            ExitCode::from(err.exit_code() as u8)
        }
    }
}
