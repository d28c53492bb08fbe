//! `kernspec`: operator spectra, Monte Carlo deviation studies and bound reports from a JSON
//! run configuration.

mod commands;
mod config;
mod error;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use config::{RunConfig, Study};
use error::CliError;

#[derive(Parser)]
#[command(name = "kernspec", version, about = "Kernel operator spectra and eigenvalue concentration studies")]
struct Cli {
    #[command(subcommand)]
    command: Command,
    /// JSON run configuration.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Overrides the seed of the config.
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Overrides the output directory of the config.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// Worker threads for trials.
    #[arg(long, global = true, env = "KERNSPEC_THREADS")]
    threads: Option<usize>,
}

#[derive(Subcommand, Clone, Copy)]
enum Command {
    /// Operator eigenvalues by level and in flat order.
    Eigs,
    /// Per-index deviation study over an n grid.
    Deviation,
    /// Coverage of the Gram, γ₁ and γ₂ bounds.
    Coverage,
    /// Relative per-index deviations against the δ₂ benchmark.
    Compare,
    /// Tail sums, noise terms, R(i) and rate bounds.
    Bounds,
    /// Rate-exponent table.
    Rates,
}

impl Command {
    fn study(self) -> Study {
        match self {
            Command::Eigs => Study::Eigs,
            Command::Deviation => Study::Deviation,
            Command::Coverage => Study::Coverage,
            Command::Compare => Study::Compare,
            Command::Bounds => Study::Bounds,
            Command::Rates => Study::Rates,
        }
    }
}

fn resolve(cli: &Cli) -> Result<RunConfig, CliError> {
    let mut config = match &cli.config {
        Some(path) => commands::load(path)?,
        None => RunConfig::default(),
    };
    if let Some(seed) = cli.seed {
        config.seed = seed;
    }
    if let Some(out) = &cli.out {
        config.out = out.clone();
    }
    if let Some(threads) = cli.threads {
        if threads == 0 {
            return Err(CliError::Config("threads must be at least 1".into()));
        }
        rayon::ThreadPoolBuilder::new()
            .num_threads(threads)
            .build_global()
            .map_err(|e| CliError::Config(format!("thread pool: {e}")))?;
    }
    Ok(config)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let outcome = resolve(&cli).and_then(|config| commands::run(cli.command.study(), &config));
    match outcome {
        Ok(files) => {
            for f in files {
                println!("{}", f.display());
            }
            ExitCode::SUCCESS
        }
        Err(e) => {
            eprintln!("kernspec: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
