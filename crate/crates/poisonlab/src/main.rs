//! poisonlab CLI: synthesize regression tasks, run poisoning sweeps,
//! verify perturbation bounds, emit spectral diagnostics, and aggregate
//! reports. Exit codes: 0 success, 1 configuration error, 2 sweep with
//! partial failures.

use clap::{Parser, Subcommand};
use poisonlab::harness::{
    cmd_diagnose, cmd_report, cmd_sweep, cmd_synth, cmd_verify_bounds, ExperimentConfig,
};
use std::path::PathBuf;
use std::process::ExitCode;

#[derive(Parser)]
#[command(
    name = "poisonlab",
    about = "Data-poisoning experiments for linear system solvers"
)]
struct Cli {
    /// JSON experiment configuration; defaults apply when omitted.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Override the base seed.
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Override the output directory.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// Override the epsilon grid (comma-separated).
    #[arg(long, global = true)]
    eps: Option<String>,
    /// Override the attack: lp, up or none.
    #[arg(long, global = true)]
    attack: Option<String>,
    /// Override the number of repeats.
    #[arg(long, global = true)]
    repeats: Option<usize>,
    /// Emit SVG charts alongside diagnostic CSVs.
    #[arg(long, global = true)]
    svg: bool,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Generate and store a task bundle.
    Synth,
    /// Run the attack x solver sweep and write metrics.csv.
    Sweep,
    /// Verify the forward perturbation bound with a t-test campaign.
    VerifyBounds,
    /// Emit spectral and convergence diagnostics.
    Diagnose,
    /// Aggregate metrics.csv into a Markdown report.
    Report,
}

fn load_config(cli: &Cli) -> poisonlab::Result<ExperimentConfig> {
    let mut cfg = match &cli.config {
        Some(path) => ExperimentConfig::from_file(path)?,
        None => ExperimentConfig::default(),
    };
    if let Some(seed) = cli.seed {
        cfg.seed = seed;
    }
    if let Some(out) = &cli.out {
        cfg.outputs = out.clone();
    }
    if let Some(eps) = &cli.eps {
        cfg.epsilons = eps
            .split(',')
            .map(|t| {
                t.trim()
                    .parse::<f64>()
                    .map_err(|e| poisonlab::Error::InvalidConfig(format!("bad --eps: {e}")))
            })
            .collect::<poisonlab::Result<_>>()?;
    }
    if let Some(attack) = &cli.attack {
        cfg.attack = attack.clone();
    }
    if let Some(repeats) = cli.repeats {
        cfg.repeats = repeats;
    }
    if cli.svg {
        cfg.svg = true;
    }
    cfg.validate()?;
    Ok(cfg)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let cfg = match load_config(&cli) {
        Ok(cfg) => cfg,
        Err(e) => {
            eprintln!("config error: {e}");
            return ExitCode::from(1);
        }
    };

    let result: poisonlab::Result<bool> = match cli.command {
        Command::Synth => cmd_synth(&cfg).map(|_| true),
        Command::Sweep => cmd_sweep(&cfg),
        Command::VerifyBounds => cmd_verify_bounds(&cfg).map(|_| true),
        Command::Diagnose => cmd_diagnose(&cfg).map(|_| true),
        Command::Report => cmd_report(&cfg).map(|_| true),
    };

    match result {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => {
            eprintln!("sweep finished with partial failures (see metrics.csv)");
            ExitCode::from(2)
        }
        Err(poisonlab::Error::InvalidConfig(msg)) => {
            eprintln!("config error: {msg}");
            ExitCode::from(1)
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
    }
}
