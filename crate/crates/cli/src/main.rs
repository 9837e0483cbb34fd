//! `conic`: reproduces the conic-martingale experiments as CSV or JSON data
//! files and runs the verification suite.

mod commands;
mod config;
mod error;
mod output;

use clap::{Parser, Subcommand};
use config::{ConfigFile, Format, RunSettings};
use error::CliError;
use output::Output;
use std::path::PathBuf;
use std::process::ExitCode;

#[derive(Debug, Parser)]
#[command(name = "conic", version, about = "Bounded martingale experiments")]
struct Cli {
    /// TOML experiment file; flags override its values.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Output directory.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    #[arg(long, global = true, value_enum)]
    format: Option<Format>,
    /// Number of simulated paths.
    #[arg(long, global = true)]
    paths: Option<usize>,
    /// Number of time steps (or grid points for tabulations).
    #[arg(long, global = true)]
    steps: Option<usize>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Sample paths of a mapped martingale.
    Simulate,
    /// Quantile fans of the Φ- and exponential martingales.
    Quantiles,
    /// Survival-surface densities, Azéma paths and conditional survival.
    Credit,
    /// Joint survival under the Gaussian copula with drift-killing correlation.
    Bivariate,
    /// Long-horizon collapse of unimodal versus bimodal mappings.
    Collapse,
    /// Invariant suite with a pass/fail report.
    Verify {
        /// Replace the copula correlation by ρ; the suite must then fail.
        #[arg(long)]
        corrupt_copula: bool,
    },
}

impl Command {
    fn name(&self) -> &'static str {
        match self {
            Command::Simulate => "simulate",
            Command::Quantiles => "quantiles",
            Command::Credit => "credit",
            Command::Bivariate => "bivariate",
            Command::Collapse => "collapse",
            Command::Verify { .. } => "verify",
        }
    }
}

const DEFAULT_SEED: u64 = 20_240_501;

fn run(cli: Cli) -> Result<(), CliError> {
    let mut cfg = match &cli.config {
        Some(path) => ConfigFile::load(path)?,
        None => ConfigFile::default(),
    };
    if let Some(exp) = &cfg.experiment {
        if exp != cli.command.name() {
            return Err(CliError::Param(format!("config is for experiment {exp:?}, not {:?}", cli.command.name())));
        }
    }
    let settings = RunSettings {
        seed: cli.seed.or(cfg.seed).unwrap_or(DEFAULT_SEED),
        out: cli.out.clone().or(cfg.out.clone()).unwrap_or_else(|| PathBuf::from("out")),
        format: cli.format.or(cfg.format).unwrap_or_default(),
        paths: cli.paths.or(cfg.paths),
        steps: cli.steps.or(cfg.steps),
    };
    if let Command::Verify { corrupt_copula: true } = cli.command {
        cfg.verify.corrupt_copula = true;
    }
    let mut out = Output::new(&settings.out, settings.format)?;
    match cli.command {
        Command::Simulate => commands::simulate::run(&cfg.simulate, &settings, &mut out)?,
        Command::Quantiles => commands::quantiles::run(&cfg.quantiles, &settings, &mut out)?,
        Command::Credit => commands::credit::run(&cfg.credit, &settings, &mut out)?,
        Command::Bivariate => commands::bivariate::run(&cfg.bivariate, &settings, &mut out)?,
        Command::Collapse => commands::collapse::run(&cfg.collapse, &settings, &mut out)?,
        Command::Verify { .. } => commands::verify::run(&cfg.verify, &settings, &mut out)?,
    }
    for path in out.written() {
        eprintln!("wrote {}", path.display());
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 1 } else { 0 });
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
