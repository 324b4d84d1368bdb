//! `backreaction`: coefficients, iterations, trajectories, residuals and
//! parameter sweeps for the radiation self-force, as CSV or JSON.
//!
//! Exit status: 0 success, 1 residual above its bound, 2 usage error,
//! 3 non-convergence, 4 runaway or numerical blow-up.

mod commands;
mod config;
mod error;
mod output;

use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use commands::{SweepParam, SweepSpec};
use config::{CommonArgs, RunConfig};
use error::CliError;

#[derive(Parser)]
#[command(name = "backreaction", version, about = "Radiation self-force as a second-order equation of motion")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Closed-form self-force coefficients with consistency residuals.
    Coeffs(CommonArgs),
    /// Radiation-term or solution iteration, one row per step.
    Iterate(CommonArgs),
    /// Integrate the reduced equation, or Lorentz–Dirac when --a0 is given.
    Trajectory(CommonArgs),
    /// Residual of a self-force against the exact self-force equation.
    Residual(ResidualArgs),
    /// Coefficients and iteration status across a parameter range.
    Sweep(SweepArgs),
}

#[derive(Args)]
struct ResidualArgs {
    #[command(flatten)]
    common: CommonArgs,
    /// Measure the jerk equality along an integrated trajectory instead of
    /// on a phase-space grid.
    #[arg(long = "along-trajectory")]
    along_trajectory: bool,
}

#[derive(Args)]
struct SweepArgs {
    #[command(flatten)]
    common: CommonArgs,
    #[arg(long, value_enum)]
    param: SweepParam,
    #[arg(long, allow_negative_numbers = true)]
    from: f64,
    #[arg(long, allow_negative_numbers = true)]
    to: f64,
    #[arg(long, default_value_t = 11)]
    count: usize,
    /// Worker threads; defaults to the available parallelism.
    #[arg(long)]
    workers: Option<usize>,
}

fn run(cli: Cli) -> Result<u8, CliError> {
    let (cfg, report) = match &cli.command {
        Command::Coeffs(a) => {
            let cfg = RunConfig::resolve(a)?;
            let r = commands::coeffs(&cfg)?;
            (cfg, r)
        }
        Command::Iterate(a) => {
            let cfg = RunConfig::resolve(a)?;
            let r = commands::iterate(&cfg)?;
            (cfg, r)
        }
        Command::Trajectory(a) => {
            let cfg = RunConfig::resolve(a)?;
            let r = commands::trajectory(&cfg)?;
            (cfg, r)
        }
        Command::Residual(a) => {
            let cfg = RunConfig::resolve(&a.common)?;
            let r = commands::residual(&cfg, a.along_trajectory)?;
            (cfg, r)
        }
        Command::Sweep(a) => {
            let cfg = RunConfig::resolve(&a.common)?;
            let workers = a
                .workers
                .unwrap_or_else(|| std::thread::available_parallelism().map_or(1, |n| n.get()));
            let spec = SweepSpec {
                param: a.param,
                from: a.from,
                to: a.to,
                count: a.count,
                workers,
            };
            let r = commands::sweep(&cfg, &spec)?;
            (cfg, r)
        }
    };
    output::emit(&report, &cfg)?;
    Ok(report.exit_code)
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("backreaction: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
