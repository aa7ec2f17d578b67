use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use urnmise::harness::{
    run_compare, run_posterior_experiment, run_rate_curves, ExperimentConfig, Mode,
};
use urnmise::{Error, Result};

#[derive(Parser)]
#[command(
    name = "urnmise",
    version,
    about = "EW/SB Polya-urn density estimators: rate curves and simulations"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Analytic MISE order curves (CSV + SVG)
    Rates(RunArgs),
    /// Posterior Gibbs simulations with empirical MISE
    Simulate(RunArgs),
    /// Both, plus a joined table
    Compare(RunArgs),
}

#[derive(Args)]
struct RunArgs {
    #[arg(long)]
    config: PathBuf,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long)]
    out_prefix: Option<String>,
}

fn load(args: &RunArgs, mode: Mode) -> Result<ExperimentConfig> {
    let text = std::fs::read_to_string(&args.config).map_err(|source| Error::Io {
        path: args.config.clone(),
        source,
    })?;
    let mut cfg = ExperimentConfig::parse_with_mode(&text, Some(mode))?;
    if let Some(seed) = args.seed {
        cfg.seed = seed;
    }
    if let Some(p) = &args.out_prefix {
        cfg.out_prefix = p.clone();
    }
    Ok(cfg)
}

fn run(cli: Cli) -> Result<Vec<PathBuf>> {
    match cli.command {
        Command::Rates(a) => Ok(run_rate_curves(&load(&a, Mode::Rates)?)?.files),
        Command::Simulate(a) => {
            let report = run_posterior_experiment(&load(&a, Mode::Simulate)?)?;
            for agg in &report.aggregates {
                eprintln!(
                    "n={} {:?}: mean mise2 {:.6e} (se {:.2e}, {} ok)",
                    agg.n, agg.model, agg.mean_mise2, agg.se_mise2, agg.ok
                );
            }
            Ok(report.files)
        }
        Command::Compare(a) => Ok(run_compare(&load(&a, Mode::Compare)?)?.files),
    }
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(files) => {
            for f in files {
                println!("{}", f.display());
            }
            ExitCode::SUCCESS
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::FAILURE
        }
    }
}
