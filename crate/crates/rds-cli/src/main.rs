use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use rds_cli::commands;

/// Reaction-diffusion solver and verification toolkit for the reversible
/// three-species system alpha U + beta V <-> gamma W.
#[derive(Debug, Parser)]
#[command(name = "rds", version, about)]
struct Cli {
    /// Suppress summary lines (errors still go to stderr).
    #[arg(long, global = true)]
    quiet: bool,
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Integrate a scenario and write its diagnostics series (and snapshots).
    Run { config: PathBuf },
    /// Print the global-existence regime verdict for the scenario's tuple.
    Classify { config: PathBuf },
    /// Check refinement stability of the space-time and duality ratios and
    /// boundedness of the semigroup smoothing sweep.
    VerifyLemmas { config: PathBuf },
    /// Classify (and optionally run) every tuple of a Cartesian parameter
    /// range, writing one CSV row per tuple.
    Sweep { config: PathBuf },
    /// Measure temporal and spatial self-convergence orders.
    Convergence { config: PathBuf },
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match &cli.command {
        Command::Run { config } => commands::cmd_run(config, cli.quiet),
        Command::Classify { config } => commands::cmd_classify(config, cli.quiet),
        Command::VerifyLemmas { config } => commands::cmd_verify_lemmas(config, cli.quiet),
        Command::Sweep { config } => commands::cmd_sweep(config, cli.quiet),
        Command::Convergence { config } => commands::cmd_convergence(config, cli.quiet),
    };
    match result {
        Ok(code) => ExitCode::from(code as u8),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(1)
        }
    }
}
