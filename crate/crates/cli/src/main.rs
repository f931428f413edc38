//! `cavitybell`: figure datasets, regime validation and the sampled Bell
//! pipeline from an INI configuration.

mod commands;
mod config;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use crate::commands::{CommandError, Output};
use crate::config::{ConfigError, Overrides, RunConfig};

const EXIT_REGIME: u8 = 1;
const EXIT_CONFIG: u8 = 2;
const EXIT_NUMERICAL: u8 = 3;

#[derive(Parser)]
#[command(
    name = "cavitybell",
    version,
    about = "Entangled atom pairs in a lossy cavity and the spin Bell test"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
    /// INI configuration file; defaults apply to everything it omits.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Output file (stdout when absent).
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// Master seed for the Monte-Carlo streams.
    #[arg(long, global = true, env = "CAVITYBELL_SEED")]
    seed: Option<u64>,
    /// Worker threads (default: available parallelism).
    #[arg(long, global = true)]
    jobs: Option<usize>,
    /// Override one setting, e.g. `--set two_level.gamma=0.01`.
    #[arg(long = "set", global = true, value_name = "SECTION.KEY=VALUE")]
    sets: Vec<String>,
}

#[derive(Subcommand, Clone, Copy)]
enum Command {
    /// Two-level preparation: P0, fidelity and |α| over (Ω⁽¹⁾, Γ).
    Fig2,
    /// Four-level preparation: P0 and fidelity over (drive, Γ).
    Fig6,
    /// B_S over (|Ω⁻|T, ϑ).
    BellSurface,
    /// Sampled Bell experiment, JSON report.
    Pipeline,
    /// Parameter-regime checks for the configured model.
    Validate,
}

fn load_config(cli: &Cli) -> Result<RunConfig, ConfigError> {
    let text = match &cli.config {
        Some(path) => std::fs::read_to_string(path)
            .map_err(|e| ConfigError(format!("cannot read config {}: {e}", path.display())))?,
        None => String::new(),
    };
    config::load(
        &text,
        &Overrides {
            sets: &cli.sets,
            seed: cli.seed,
        },
    )
}

fn execute(command: Command, cfg: &RunConfig) -> Result<Output, CommandError> {
    match command {
        Command::Fig2 => commands::fig2(cfg),
        Command::Fig6 => commands::fig6(cfg),
        Command::BellSurface => commands::bell(cfg),
        Command::Pipeline => commands::pipeline(cfg),
        Command::Validate => commands::validate(cfg),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let cfg = match load_config(&cli) {
        Ok(c) => c,
        Err(e) => {
            eprintln!("config error: {e}");
            return ExitCode::from(EXIT_CONFIG);
        }
    };
    let mut pool = rayon::ThreadPoolBuilder::new();
    if let Some(jobs) = cli.jobs {
        if jobs == 0 {
            eprintln!("config error: --jobs must be ≥ 1");
            return ExitCode::from(EXIT_CONFIG);
        }
        pool = pool.num_threads(jobs);
    }
    let pool = match pool.build() {
        Ok(p) => p,
        Err(e) => {
            eprintln!("cannot start worker pool: {e}");
            return ExitCode::from(EXIT_CONFIG);
        }
    };
    let output = match pool.install(|| execute(cli.command, &cfg)) {
        Ok(o) => o,
        Err(CommandError::Config(msg)) => {
            eprintln!("config error: {msg}");
            return ExitCode::from(EXIT_CONFIG);
        }
        Err(CommandError::Numerical(e)) => {
            eprintln!("numerical failure: {e}");
            return ExitCode::from(EXIT_NUMERICAL);
        }
    };
    let written = match &cli.out {
        Some(path) => std::fs::write(path, &output.body)
            .map_err(|e| format!("cannot write {}: {e}", path.display())),
        None => {
            print!("{}", output.body);
            Ok(())
        }
    };
    if let Err(msg) = written {
        eprintln!("{msg}");
        return ExitCode::from(EXIT_CONFIG);
    }
    if output.regime_failed {
        ExitCode::from(EXIT_REGIME)
    } else {
        ExitCode::SUCCESS
    }
}
