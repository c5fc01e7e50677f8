//! `harmonic` — exact steady state, simulation and macroscopic
//! functionals of the boundary-driven harmonic process.

mod commands;
mod config;
mod output;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use config::{OutputFormat, RunConfig};
use output::OutputSink;

#[derive(Parser)]
#[command(
    name = "harmonic",
    version,
    about = "Boundary-driven harmonic process: exact steady state, simulation, pressure and large deviations"
)]
struct Cli {
    /// JSON run configuration (defaults apply when omitted)
    #[arg(long, global = true)]
    config: Option<PathBuf>,

    /// Output directory
    #[arg(long, global = true, default_value = "out")]
    out: PathBuf,

    /// Override the simulation seed from the config
    #[arg(long, global = true)]
    seed: Option<u64>,

    /// Output format for tabular files
    #[arg(long, global = true, value_enum)]
    format: Option<OutputFormat>,

    /// Normalize rho_left > rho_right by lattice reflection
    #[arg(long, global = true)]
    allow_reflect: bool,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Event-driven simulation with replica statistics
    Simulate,
    /// Exact steady state: moments, marginals, state probabilities
    Ness,
    /// Moment generating function tables
    Mgf,
    /// Variational and closed-form pressure, finite-volume trend
    Pressure,
    /// Density large-deviation rate function
    Ldf,
    /// Additivity principle report
    Additivity,
    /// Run the verification battery
    Verify {
        /// Run a single named check
        #[arg(long)]
        check: Option<String>,
    },
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::FAILURE,
        Err(err) => {
            eprintln!("error: {err:#}");
            ExitCode::FAILURE
        }
    }
}

fn run(cli: Cli) -> anyhow::Result<bool> {
    let cfg = match &cli.config {
        Some(path) => RunConfig::load(path)?,
        None => RunConfig::default(),
    };
    let (cfg, params) = cfg.resolve(cli.seed, cli.format, cli.allow_reflect)?;
    let canonical = cfg.canonical_json()?;
    let sink = OutputSink::new(&cli.out, cfg.hash()?)?;
    sink.write_resolved_config(&canonical)?;

    match cli.command {
        Command::Simulate => commands::simulate::run_command(&cfg, &params, &sink)?,
        Command::Ness => commands::ness::run_command(&cfg, &params, &sink)?,
        Command::Mgf => commands::mgf::run_command(&cfg, &params, &sink)?,
        Command::Pressure => commands::pressure::run_command(&cfg, &params, &sink)?,
        Command::Ldf => commands::ldf::run_command(&cfg, &params, &sink)?,
        Command::Additivity => commands::additivity::run_command(&cfg, &params, &sink)?,
        Command::Verify { check } => {
            return commands::verify::run_command(check.as_deref(), &sink);
        }
    }
    Ok(true)
}
