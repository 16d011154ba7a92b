//! Command-line front end for one-bit MMSE channel estimation.

mod estimate;
mod figure;
mod parse;
mod validate;

use std::io::Write;
use std::process::ExitCode;

use anyhow::{Context, Result};
use clap::{Parser, Subcommand};

const THREADS_VAR: &str = "ONEBIT_MMSE_THREADS";

#[derive(Debug, Parser)]
#[command(name = "onebit-mmse", version, about = "MMSE channel estimation from one-bit observations")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Conditional-mean channel estimate for one observation, as JSON.
    Estimate(estimate::EstimateArgs),
    /// Write the MMSE table behind a figure as CSV plus a JSON sidecar.
    Figure(figure::FigureArgs),
    /// Run a self-check suite; exits 1 if any check fails.
    Validate(validate::ValidateArgs),
    /// Multivariate normal orthant probability, as JSON.
    Orthant(validate::OrthantArgs),
}

/// 2 for invalid input, 3 for numerical failure, 4 for I/O.
fn exit_code(err: &anyhow::Error) -> u8 {
    for cause in err.chain() {
        if let Some(e) = cause.downcast_ref::<onebit_mmse::Error>() {
            return if e.is_numerical() { 3 } else { 2 };
        }
        if cause.downcast_ref::<std::io::Error>().is_some() {
            return 4;
        }
        if let Some(e) = cause.downcast_ref::<csv::Error>() {
            if e.is_io_error() {
                return 4;
            }
        }
    }
    2
}

fn configure_threads() -> Result<()> {
    let Ok(value) = std::env::var(THREADS_VAR) else {
        return Ok(());
    };
    let threads: usize = value
        .trim()
        .parse()
        .ok()
        .filter(|t| *t > 0)
        .with_context(|| format!("{THREADS_VAR} must be a positive integer, got `{value}`"))?;
    rayon::ThreadPoolBuilder::new()
        .num_threads(threads)
        .build_global()
        .context("cannot configure the thread pool")?;
    Ok(())
}

/// Prints to stdout; a closed pipe (e.g. `| head`) is not an error.
fn emit(text: &str) -> Result<()> {
    let mut out = std::io::stdout().lock();
    match writeln!(out, "{text}").and_then(|_| out.flush()) {
        Err(e) if e.kind() != std::io::ErrorKind::BrokenPipe => Err(e.into()),
        _ => Ok(()),
    }
}

fn run(cli: &Cli) -> Result<bool> {
    configure_threads()?;
    match &cli.command {
        Command::Estimate(args) => emit(&estimate::run(args)?)?,
        Command::Figure(args) => eprintln!("{}", figure::run(args)?),
        Command::Validate(args) => {
            let (text, passed) = validate::run_validate(args)?;
            emit(&text)?;
            return Ok(passed);
        }
        Command::Orthant(args) => emit(&validate::run_orthant(args)?)?,
    }
    Ok(true)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(err) => {
            eprintln!("error: {err:#}");
            ExitCode::from(exit_code(&err))
        }
    }
}
