//! `zenosim` — trajectories, superoperator spectra, and decay-rate scans for
//! a dot-chain lattice under repeated projective dot-occupancy measurements.

mod commands;
mod config;
mod output;

use clap::{Args, Parser, Subcommand};
use std::path::PathBuf;
use std::process::ExitCode;

#[derive(Parser)]
#[command(name = "zenosim", version, about)]
struct Cli {
    #[command(subcommand)]
    command: CliCommand,
}

#[derive(Args)]
struct RunArgs {
    /// JSON run configuration
    #[arg(long)]
    config: PathBuf,
    /// Output directory (overrides output_dir from the config)
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Subcommand)]
enum CliCommand {
    /// Iterate the measurement channel; emit trajectory.csv and optional
    /// density-matrix snapshots
    Evolve(RunArgs),
    /// Evolve with mandatory density-matrix snapshots at chosen steps
    Tomography(RunArgs),
    /// Eigenvalues and dot weights of the measurement superoperator
    Spectrum(RunArgs),
    /// Decay rate versus measurement interval over a tau grid
    RateScan(RunArgs),
    /// Closed-form two-level survival against the full pipeline (N = 1)
    TwoLevel(RunArgs),
    /// Fixed-point uniqueness report; exit 0 if unique, 3 if not
    CheckStationary(RunArgs),
}

fn run() -> anyhow::Result<i32> {
    let cli = Cli::parse();
    let (command, args) = match &cli.command {
        CliCommand::Evolve(a) => (config::Command::Evolve, a),
        CliCommand::Tomography(a) => (config::Command::Tomography, a),
        CliCommand::Spectrum(a) => (config::Command::Spectrum, a),
        CliCommand::RateScan(a) => (config::Command::RateScan, a),
        CliCommand::TwoLevel(a) => (config::Command::TwoLevel, a),
        CliCommand::CheckStationary(a) => (config::Command::CheckStationary, a),
    };
    let file = config::load(&args.config)?;
    let cfg = config::resolve(file, command, args.out.clone())?;
    commands::execute(&cfg)
}

fn main() -> ExitCode {
    match run() {
        Ok(code) => ExitCode::from(code as u8),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(1)
        }
    }
}
