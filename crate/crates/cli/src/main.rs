//! `gravre`: relative equilibria of planar dumbbell systems from the
//! command line. Subcommands reproduce branch curves, stability maps, torus
//! scans, pitchfork normal forms and the perpendicular-bisector cone test
//! as CSV/JSON/SVG artifacts.

mod commands;
mod out;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

#[derive(Parser)]
#[command(
    name = "gravre",
    version,
    about = "Relative equilibria of planar dumbbell systems"
)]
struct Cli {
    /// Output directory (created if missing).
    #[arg(long, global = true, default_value = ".")]
    out: PathBuf,

    /// Comma-separated outputs to produce: csv,json,svg.
    #[arg(long, global = true, default_value = "csv,json,svg")]
    formats: String,

    /// Worker cap for parallel sweeps (default: GRAVRE_JOBS, then all cores).
    #[arg(long, global = true)]
    jobs: Option<usize>,

    /// Random seed; recorded in JSON outputs for reproducibility.
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Point-mass two-body RE, stability and optional phase portrait.
    Kepler(commands::kepler::Args),
    /// L^2(r) profile of a named RE family.
    Branch(commands::branch::Args),
    /// Stability verdicts over a parameter plane.
    Map(commands::map::Args),
    /// All RE on the (theta1, theta2) torus at fixed radius (equal mass).
    Torus(commands::torus::Args),
    /// Pitchfork branch point and quadratic branch model (equal mass).
    Pitchfork(commands::pitchfork::Args),
    /// Cone test of a dumbbell against discretized bodies from JSON.
    PerpCheck(commands::perp_check::Args),
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(err) => {
            eprintln!("error: {err:#}");
            ExitCode::from(exit_code_for(&err))
        }
    }
}

fn run(cli: Cli) -> anyhow::Result<()> {
    let jobs = cli
        .jobs
        .or_else(|| {
            std::env::var("GRAVRE_JOBS")
                .ok()
                .and_then(|v| v.parse().ok())
        })
        .filter(|&n| n > 0);
    if let Some(n) = jobs {
        rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build_global()
            .ok(); // a pool may already exist in tests
    }
    std::fs::create_dir_all(&cli.out)?;
    let formats = out::Formats::parse(&cli.formats)?;
    let ctx = commands::Ctx {
        out_dir: cli.out,
        formats,
        seed: cli.seed,
    };
    match cli.command {
        Command::Kepler(args) => commands::kepler::run(&ctx, args),
        Command::Branch(args) => commands::branch::run(&ctx, args),
        Command::Map(args) => commands::map::run(&ctx, args),
        Command::Torus(args) => commands::torus::run(&ctx, args),
        Command::Pitchfork(args) => commands::pitchfork::run(&ctx, args),
        Command::PerpCheck(args) => commands::perp_check::run(&ctx, args),
    }
}

/// 2 = validation, 3 = numerical failure, 4 = I/O.
fn exit_code_for(err: &anyhow::Error) -> u8 {
    for cause in err.chain() {
        if let Some(core) = cause.downcast_ref::<gravre_core::Error>() {
            return match core {
                gravre_core::Error::InvalidParams(_)
                | gravre_core::Error::BelowMinimumRadius { .. } => 2,
                _ => 3,
            };
        }
        if cause.downcast_ref::<std::io::Error>().is_some() {
            return 4;
        }
        if cause.downcast_ref::<commands::ValidationError>().is_some() {
            return 2;
        }
        if cause.downcast_ref::<serde_json::Error>().is_some() {
            return 2;
        }
    }
    2
}
