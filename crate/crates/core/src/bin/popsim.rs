use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use popsim::config::ExperimentConfig;
use popsim::harness::{self, Command, Overrides, RunManifest, MANIFEST_FILE};
use popsim::Error;

#[derive(Parser)]
#[command(name = "popsim", version, about = "Population-coding Monte Carlo simulator")]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Measured vs analytic tuning curve of one junction.
    Tuning(RunArgs),
    /// Error-vs-steps learning curve averaged over instances.
    Learn(RunArgs),
    /// Recovery after neuron loss against fresh reduced systems.
    NeuronLoss(RunArgs),
    /// Learning curves for several weight barriers plus a no-loss run.
    WeightLoss(RunArgs),
    /// Power/error sweep over population size and weight barrier.
    Pareto(RunArgs),
    /// Echo the resolved config and derived quantities.
    Validate(RunArgs),
    /// Rerun an experiment from its manifest and check the checksums.
    Replay {
        /// Manifest file or the directory containing it.
        manifest: PathBuf,
        #[arg(long)]
        out: PathBuf,
        #[arg(long)]
        workers: Option<usize>,
    },
}

#[derive(Args)]
struct RunArgs {
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long)]
    out: PathBuf,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long)]
    instances: Option<u32>,
    #[arg(long)]
    steps: Option<u64>,
    /// Worker threads (0 = all cores). Does not change results.
    #[arg(long)]
    workers: Option<usize>,
}

fn run_command(command: Command, args: RunArgs) -> popsim::Result<()> {
    let mut cfg = match &args.config {
        Some(path) => ExperimentConfig::load(path)?,
        None => ExperimentConfig::default(),
    };
    Overrides {
        seed: args.seed,
        instances: args.instances,
        steps: args.steps,
        workers: args.workers,
    }
    .apply(&mut cfg)?;
    let report = harness::run(command, &cfg, &args.out)?;
    for line in &report.lines {
        println!("{line}");
    }
    println!("wrote {} files to {}", report.outputs.len() + 1, report.out_dir.display());
    Ok(())
}

fn replay(manifest: PathBuf, out: PathBuf, workers: Option<usize>) -> popsim::Result<()> {
    let path = if manifest.is_dir() { manifest.join(MANIFEST_FILE) } else { manifest };
    let m = RunManifest::load(&path)?;
    let report = harness::replay(&m, &out, workers)?;
    let bad = harness::mismatches(&m, &report);
    if bad.is_empty() {
        println!("replay of {} matches all {} outputs", m.command, m.outputs.len());
        Ok(())
    } else {
        Err(Error::Degenerate(format!("replay differs in: {}", bad.join(", "))))
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.cmd {
        Cmd::Tuning(a) => run_command(Command::Tuning, a),
        Cmd::Learn(a) => run_command(Command::Learn, a),
        Cmd::NeuronLoss(a) => run_command(Command::NeuronLoss, a),
        Cmd::WeightLoss(a) => run_command(Command::WeightLoss, a),
        Cmd::Pareto(a) => run_command(Command::Pareto, a),
        Cmd::Validate(a) => run_command(Command::Validate, a),
        Cmd::Replay { manifest, out, workers } => replay(manifest, out, workers),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("popsim: {e}");
            match e {
                Error::Config(_) => ExitCode::from(2),
                _ => ExitCode::from(3),
            }
        }
    }
}
