mod commands;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

/// Fourth-order compact and second-order explicit solvers for the 3D acoustic
/// wave equation, with exact-solution checks and convergence studies.
#[derive(Debug, Parser)]
#[command(name = "compact-wave", version)]
struct Cli {
    /// TOML run configuration; command-line flags override its keys.
    #[arg(long, global = true)]
    config: Option<PathBuf>,

    /// More log output (repeat for more).
    #[arg(short, long, action = clap::ArgAction::Count, global = true)]
    verbose: u8,

    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Args)]
pub struct MeshArgs {
    /// Spatial intervals per axis.
    #[arg(long = "N", alias = "n")]
    pub n: Option<usize>,
    /// Time steps.
    #[arg(long = "M", alias = "m")]
    pub m: Option<usize>,
}

#[derive(Debug, Args)]
pub struct SchemeArgs {
    /// First-step variant of the compact scheme: two-level or three-level.
    #[arg(long)]
    pub first_step: Option<String>,
    /// Worker threads; defaults to all cores.
    #[arg(long)]
    pub workers: Option<usize>,
    /// Multiply u_1 by the density in the explicit first step.
    #[arg(long)]
    pub explicit_rho_weight: bool,
    /// Add (h_t²/6) L_h u_1 to the explicit first step.
    #[arg(long)]
    pub explicit_velocity_correction: bool,
    /// Output directory.
    #[arg(long, short)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Run one scenario on one mesh.
    Run {
        scenario: Option<String>,
        #[command(flatten)]
        mesh: MeshArgs,
        /// compact or explicit.
        #[arg(long)]
        scheme: Option<String>,
        #[command(flatten)]
        common: SchemeArgs,
        /// Comma-separated snapshot times.
        #[arg(long, value_delimiter = ',')]
        snapshots: Option<Vec<f64>>,
        /// Sample the error series every K steps (0 disables it).
        #[arg(long)]
        series_every: Option<usize>,
        /// Factor applied to the L2 column of the error series.
        #[arg(long)]
        l2_scale: Option<f64>,
        /// Also write binary field dumps at the snapshots.
        #[arg(long)]
        dump: bool,
        /// Exit with status 2 if the stability condition fails.
        #[arg(long)]
        strict: bool,
    },
    /// Convergence study over a refinement ladder.
    Converge {
        scenario: Option<String>,
        /// Comma-separated NxM pairs, e.g. 81x27,135x45.
        #[arg(long, value_delimiter = ',')]
        ladder: Option<Vec<String>>,
        /// compact, explicit or both.
        #[arg(long)]
        scheme: Option<String>,
        #[command(flatten)]
        common: SchemeArgs,
        /// Fill the timing columns of the CSV.
        #[arg(long)]
        timing: bool,
    },
    /// Report the stability condition for a mesh.
    CheckStability {
        scenario: Option<String>,
        #[command(flatten)]
        mesh: MeshArgs,
        /// Exit with status 2 if the condition fails.
        #[arg(long)]
        strict: bool,
    },
    /// Dump the exact solution on a mesh.
    Oracle {
        scenario: Option<String>,
        #[command(flatten)]
        mesh: MeshArgs,
        /// Evaluation time; defaults to the final time.
        #[arg(long)]
        t: Option<f64>,
        /// Output directory.
        #[arg(long, short)]
        out: Option<PathBuf>,
    },
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return match e.kind() {
                clap::error::ErrorKind::DisplayHelp | clap::error::ErrorKind::DisplayVersion => {
                    ExitCode::SUCCESS
                }
                _ => ExitCode::from(commands::EXIT_CONFIG),
            };
        }
    };
    let level = match cli.verbose {
        0 => "warn",
        1 => "info",
        _ => "debug",
    };
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or(level)).init();
    match commands::dispatch(cli.config.as_deref(), cli.command) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.code())
        }
    }
}
