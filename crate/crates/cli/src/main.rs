//! kakeya-lab: batch CLI over the kakeya-core pipelines.
//!
//! Every run writes a JSON report embedding the fully resolved configuration
//! and the tool version, plus CSV data files where bulk numbers are produced.
//! Exit codes: 0 success, 1 condition-check failure, 2 usage error,
//! 3 numerical failure.

mod commands;
mod report;

use clap::{Parser, Subcommand};
use kakeya_core::Error as CoreError;

#[derive(Parser)]
#[command(
    name = "kakeya-lab",
    version,
    about = "Geodesic straightening, phase-function condition checks, and curved-Kakeya measure experiments"
)]
struct Cli {
    /// Cap the worker thread count (fallback: KAKEYA_LAB_THREADS).
    #[arg(long, global = true)]
    threads: Option<usize>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Space-form geometry: straightening charts and scans.
    Geo {
        #[command(subcommand)]
        command: commands::geo::GeoCommand,
    },
    /// Phase-function pipelines.
    Phase {
        #[command(subcommand)]
        command: commands::phase::PhaseCommand,
    },
    /// Build occupancy grids from tube families.
    Set {
        #[command(subcommand)]
        command: commands::set::SetCommand,
    },
    /// Box-counting dimension estimates.
    Dim {
        #[command(subcommand)]
        command: commands::dim::DimCommand,
    },
    /// Discretized maximal-function scans.
    Maximal {
        #[command(subcommand)]
        command: commands::maximal::MaximalCommand,
    },
    /// Nikodym coverage fractions.
    Nikodym {
        #[command(subcommand)]
        command: commands::coverage::NikodymCommand,
    },
    /// Apply the projective Nikodym→Kakeya transform to a point cloud.
    NikodymToKakeya(commands::projective::ProjectiveArgs),
    /// The line-space model map (z, e) ↦ (ρ, η) on surfaces.
    Linespace {
        #[command(subcommand)]
        command: commands::linespace::LinespaceCommand,
    },
}

/// Outcome of a command: success or a failed condition check (exit 1).
pub enum Outcome {
    Success,
    ConditionFailed,
}

fn main() {
    let cli = Cli::parse();

    let threads = cli.threads.or_else(|| {
        std::env::var("KAKEYA_LAB_THREADS")
            .ok()
            .and_then(|v| v.parse().ok())
    });
    if let Some(n) = threads {
        if let Err(e) = rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build_global()
        {
            eprintln!("warning: could not configure thread pool: {e}");
        }
    }

    let result = match cli.command {
        Command::Geo { command } => commands::geo::run(command),
        Command::Phase { command } => commands::phase::run(command),
        Command::Set { command } => commands::set::run(command),
        Command::Dim { command } => commands::dim::run(command),
        Command::Maximal { command } => commands::maximal::run(command),
        Command::Nikodym { command } => commands::coverage::run(command),
        Command::NikodymToKakeya(args) => commands::projective::run(args),
        Command::Linespace { command } => commands::linespace::run(command),
    };

    let code = match result {
        Ok(Outcome::Success) => 0,
        Ok(Outcome::ConditionFailed) => 1,
        Err(err) => {
            eprintln!("error: {err}");
            exit_code_for(&err)
        }
    };
    std::process::exit(code);
}

fn exit_code_for(err: &anyhow::Error) -> i32 {
    match err.downcast_ref::<CoreError>() {
        // a precondition failing is a condition-check failure
        Some(CoreError::Precondition(_)) => 1,
        Some(CoreError::Config(_)) => 2,
        Some(_) => 3,
        // i/o, parsing, and other non-core errors are usage problems
        None => 2,
    }
}
