//! Command-line front end: scenario validation, feasibility checks, single
//! runs, Monte Carlo sweeps and plot-data export.

mod commands;

use clap::{Parser, Subcommand};
use std::path::PathBuf;
use std::process::ExitCode;

/// Exit code for an infeasible (but valid) scenario.
pub const EXIT_INFEASIBLE: u8 = 2;

#[derive(Parser)]
#[command(
    name = "pursuit-guard",
    about = "Deterministic multi-agent interception, containment, coverage and obstacle-avoidance simulator",
    version
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Validate a scenario and evaluate its feasibility condition.
    Check {
        #[arg(long)]
        scenario: PathBuf,
        /// Override the coverage method (igd | sweep) without editing the file.
        #[arg(long)]
        mode_override: Option<String>,
    },
    /// Run one seeded simulation and write its trace.
    Run {
        #[arg(long)]
        scenario: PathBuf,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Trace output path (JSON Lines). Defaults next to the scenario.
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long)]
        mode_override: Option<String>,
    },
    /// Seed sweep: run many seeds and write a per-seed summary CSV.
    Sweep {
        #[arg(long)]
        scenario: PathBuf,
        #[arg(long)]
        seeds: u64,
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long)]
        mode_override: Option<String>,
    },
    /// Export kind-specific CSV columns from a trace file.
    PlotData {
        #[arg(long)]
        trace: PathBuf,
        /// One of: trajectories, y-evolution, distances, clearance.
        #[arg(long)]
        kind: String,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Check {
            scenario,
            mode_override,
        } => commands::cmd_check(&scenario, mode_override.as_deref()),
        Command::Run {
            scenario,
            seed,
            out,
            mode_override,
        } => commands::cmd_run(&scenario, seed, out.as_deref(), mode_override.as_deref()),
        Command::Sweep {
            scenario,
            seeds,
            out,
            mode_override,
        } => commands::cmd_sweep(&scenario, seeds, out.as_deref(), mode_override.as_deref()),
        Command::PlotData { trace, kind, out } => {
            commands::cmd_plot_data(&trace, &kind, out.as_deref())
        }
    };
    match result {
        Ok(code) => ExitCode::from(code),
        Err(err) => {
            eprintln!("error: {err:#}");
            ExitCode::from(1)
        }
    }
}
