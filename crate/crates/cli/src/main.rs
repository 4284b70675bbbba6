//! Command-line front end: scenario verification, theta sweeps, feasibility
//! plot data, and Monte Carlo sampling, with machine-readable outputs.
//!
//! Exit codes: 0 verification passed, 1 verification failed, 2 invalid
//! configuration or parameters.

mod commands;
mod config;
mod report;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use qelim::QelimError;

use crate::config::{parse_angle, Overrides, Resolved};

#[derive(Parser)]
#[command(
    name = "qelim",
    version,
    about = "Covariant state-elimination measurements for qubit sequences"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct ScenarioArgs {
    /// JSON config file; flags override its fields.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Scenario: trine, d3, two_qubit, three_qubit_pairs, four_qubit_quads,
    /// n_qubit, failure_two_qubit.
    #[arg(long)]
    scenario: Option<String>,
    /// Angle in radians or as piOverN (e.g. piOver8).
    #[arg(long)]
    theta: Option<String>,
    /// Qubit count (n_qubit scenario only).
    #[arg(long)]
    n: Option<usize>,
    /// States per qubit N of the Z_N extension (default 2).
    #[arg(long = "big-n")]
    big_n: Option<usize>,
    /// RNG seed for sampling.
    #[arg(long)]
    seed: Option<u64>,
    /// Shot count for sampling.
    #[arg(long)]
    shots: Option<u64>,
    /// Output path (default: stdout).
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Subcommand)]
enum Command {
    /// Build a scenario's POVM and verify completeness, positivity,
    /// elimination, and (for coset scenarios) entropic feasibility.
    Verify(ScenarioArgs),
    /// Sweep theta and emit one CSV row of residuals per grid point.
    Sweep {
        #[command(flatten)]
        scenario: ScenarioArgs,
        /// Lower end of the theta grid (radians or piOverN).
        #[arg(long, default_value = "0")]
        theta_min: String,
        /// Upper end of the theta grid (radians or piOverN).
        #[arg(long, default_value = "piOver4")]
        theta_max: String,
        /// Grid size.
        #[arg(long, default_value_t = 50)]
        points: usize,
    },
    /// Emit the four-qubit feasibility data (s, gap, bound) as CSV with a
    /// threshold footer row.
    Figure1 {
        #[arg(long, default_value_t = 200)]
        points: usize,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Monte Carlo sample every orbit state and report outcome counts.
    Sample(ScenarioArgs),
}

fn resolved(args: &ScenarioArgs) -> Result<Resolved, QelimError> {
    config::resolve(
        args.config.as_deref(),
        Overrides {
            scenario: args.scenario.as_deref(),
            theta: args.theta.as_deref(),
            n: args.n,
            big_n: args.big_n,
            seed: args.seed,
            shots: args.shots,
        },
    )
}

fn emit(text: &str, out: Option<&PathBuf>) -> Result<(), QelimError> {
    match out {
        Some(path) => std::fs::write(path, text).map_err(|e| {
            QelimError::InvalidParameter(format!("cannot write {}: {e}", path.display()))
        }),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn config_error(e: &QelimError) -> bool {
    matches!(
        e,
        QelimError::InvalidParameter(_)
            | QelimError::NoExactSolution { .. }
            | QelimError::ExactRegime { .. }
            | QelimError::InvalidSubgroup(_)
            | QelimError::UnsupportedGroup(_)
            | QelimError::InvalidPartition(_)
            | QelimError::InvalidDensityMatrix(_)
    )
}

fn fail(e: QelimError) -> ExitCode {
    eprintln!("error: {e}");
    if matches!(e, QelimError::NoExactSolution { .. }) {
        eprintln!("hint: below the exact threshold run --scenario failure_two_qubit");
    }
    if config_error(&e) {
        ExitCode::from(2)
    } else {
        ExitCode::from(1)
    }
}

fn run() -> Result<ExitCode, QelimError> {
    let cli = Cli::parse();
    match cli.command {
        Command::Verify(args) => {
            let cfg = resolved(&args)?;
            let report = commands::run_verify(&cfg)?;
            let text = serde_json::to_string_pretty(&report)
                .map_err(|e| QelimError::NumericalFailure(format!("JSON encoding: {e}")))?;
            emit(&format!("{text}\n"), args.out.as_ref())?;
            Ok(if report.pass {
                ExitCode::SUCCESS
            } else {
                ExitCode::from(1)
            })
        }
        Command::Sweep {
            scenario,
            theta_min,
            theta_max,
            points,
        } => {
            let cfg = resolved(&scenario)?;
            let lo = parse_angle(&theta_min)?;
            let hi = parse_angle(&theta_max)?;
            let csv = commands::run_sweep(&cfg, lo, hi, points)?;
            emit(&csv, scenario.out.as_ref())?;
            Ok(ExitCode::SUCCESS)
        }
        Command::Figure1 { points, out } => {
            let csv = commands::run_figure1(points)?;
            emit(&csv, out.as_ref())?;
            Ok(ExitCode::SUCCESS)
        }
        Command::Sample(args) => {
            let cfg = resolved(&args)?;
            let report = commands::run_sample(&cfg)?;
            let text = serde_json::to_string_pretty(&report)
                .map_err(|e| QelimError::NumericalFailure(format!("JSON encoding: {e}")))?;
            emit(&format!("{text}\n"), args.out.as_ref())?;
            Ok(if report.pass {
                ExitCode::SUCCESS
            } else {
                ExitCode::from(1)
            })
        }
    }
}

fn main() -> ExitCode {
    match run() {
        Ok(code) => code,
        Err(e) => fail(e),
    }
}
