//! `steinlab`: seeded experiments on quantum hypothesis testing in the Stein regime.
//!
//! Every subcommand reads its parameters from flags, a JSON config (`--config`),
//! or both; flags win. Artifacts are deterministic for a given configuration and
//! seed, and each one gets a `<artifact>.manifest.json` recording the version,
//! seed, config hash and wall time.
//!
//! Exit codes: 0 success, 2 config error, 3 numeric or dimension-cap error,
//! 4 a check or acceptance criterion failed.

mod commands;
mod config;
mod output;

use std::path::PathBuf;
use std::process::ExitCode;
use std::time::Instant;

use clap::{Parser, Subcommand};

use commands::{DesignArgs, ExponentArgs, GaussianArgs, IneqArgs, IspecArgs, SchurArgs, SelftestArgs};
use config::{field_error, CliError};
use output::Ctx;

#[derive(Parser)]
#[command(name = "steinlab", version, about = "Quantum hypothesis testing experiments in the Stein regime")]
struct Cli {
    /// JSON config; keys are the flag names with underscores. Command-line flags win.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Print JSON lines instead of tables and text.
    #[arg(long, global = true)]
    json: bool,
    /// Largest tensor-power dimension (overrides STEINLAB_DIM_CAP).
    #[arg(long, global = true)]
    dim_cap: Option<usize>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Schur–Weyl block decomposition of the n-fold tensor power.
    Schur(SchurArgs),
    /// Designed rank-one measurement: block structure, outcome statistics, variance identity, Chernoff bounds.
    Design(DesignArgs),
    /// −(1/n) log β over n for one or more test strategies.
    Exponent(ExponentArgs),
    /// Threshold tests and log-likelihood-ratio quantiles for classical distribution pairs.
    Ispec(IspecArgs),
    /// Stress suites for the operator inequalities and the plog2 constant.
    Ineq(IneqArgs),
    /// Displaced thermal states discriminated by number detection.
    ///
    /// The null is accepted when |sqrt(k/n) − |theta0 − theta1|| <= eps. This
    /// window is the complement of the set {|sqrt(k/n) − |theta0 − theta1|| > eps}
    /// that is sometimes written as the acceptance region; accepting there would
    /// drive the first error to 1. β is the mass of
    /// sqrt(k/n) >= |theta0 − theta1| − eps under the alternative.
    Gaussian(GaussianArgs),
    /// Runs every acceptance criterion twice and checks the artifacts are byte-identical.
    Selftest(SelftestArgs),
    /// Runs the experiment named by the config file's `experiment` key.
    Run {
        /// Config file.
        file: PathBuf,
    },
}

impl Command {
    fn name(&self) -> &'static str {
        match self {
            Command::Schur(_) => "schur",
            Command::Design(_) => "design",
            Command::Exponent(_) => "exponent",
            Command::Ispec(_) => "ispec",
            Command::Ineq(_) => "ineq",
            Command::Gaussian(_) => "gaussian",
            Command::Selftest(_) => "selftest",
            Command::Run { .. } => "run",
        }
    }
}

fn execute(cli: Cli) -> Result<(), CliError> {
    if let Some(cap) = cli.dim_cap {
        if cap == 0 {
            return Err(field_error("dim_cap", "must be positive"));
        }
    }
    let mut ctx = Ctx { json: cli.json, command: cli.command.name(), started: Instant::now() };
    if let Command::Run { file } = &cli.command {
        if cli.config.is_some() {
            return Err(field_error("config", "`run` takes the config as its argument"));
        }
        return commands::run_config(&mut ctx, file, cli.dim_cap);
    }
    let cfg = cli.config.as_deref().map(config::load_config).transpose()?;
    if let Some(c) = &cfg {
        if let Some(exp) = c.experiment.as_deref().filter(|&e| e != ctx.command) {
            return Err(field_error("experiment", format!("config is for '{exp}', not '{}'", ctx.command)));
        }
        if let Some(cap) = c.dim_cap {
            steinlab::limits::set_dim_cap(cap);
        }
    }
    if let Some(cap) = cli.dim_cap {
        steinlab::limits::set_dim_cap(cap);
    }
    let cfg = cfg.as_ref();
    match &cli.command {
        Command::Schur(a) => commands::schur(&ctx, a, cfg),
        Command::Design(a) => commands::design(&ctx, a, cfg),
        Command::Exponent(a) => commands::exponent(&ctx, a, cfg),
        Command::Ispec(a) => commands::ispec(&ctx, a, cfg),
        Command::Ineq(a) => commands::ineq(&ctx, a, cfg),
        Command::Gaussian(a) => commands::gaussian(&ctx, a, cfg),
        Command::Selftest(a) => commands::selftest(&ctx, a, cfg),
        Command::Run { .. } => unreachable!("handled above"),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match execute(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
