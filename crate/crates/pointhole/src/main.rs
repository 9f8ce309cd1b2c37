use clap::{Parser, Subcommand};
use pointhole::cli::{self, ExperimentConfig, RunOptions};
use std::path::PathBuf;
use std::process::ExitCode;

/// Point interactions from singularly scaled Robin holes: defect functions,
/// the limit operator, perturbed solvers, and convergence-rate studies.
#[derive(Parser)]
#[command(name = "pointhole", version, about)]
struct Args {
    /// Experiment configuration (TOML). Omit to use the built-in benchmark.
    #[arg(long, global = true)]
    config: Option<PathBuf>,

    /// Output directory for CSV/SVG artifacts.
    #[arg(long, global = true, default_value = "out")]
    out: PathBuf,

    /// Worker count for sweeps (1 = fully deterministic serial order).
    #[arg(long, global = true, default_value_t = 1)]
    jobs: usize,

    /// Seed for randomized diagnostics.
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Tabulate the boundary coefficient and check the integral identity.
    Alpha0,
    /// Compute the coupling constants K, beta and the admissibility flag.
    Coupling,
    /// Construct the defect function and dump a polar probe grid.
    Green,
    /// Solve the limit-operator resolvent equation at the configured lambda.
    LimitSolve,
    /// Eigenvalues of the limit operator on the disc.
    LimitEigs,
    /// Exact radial solution of the perturbed problem at a single eps.
    PerturbedSolve,
    /// Annulus eigenvalues of the perturbed operator at a single eps.
    PerturbedEigs,
    /// Run the eps sweeps and fit convergence rates.
    Sweep,
    /// Run the measurable diagnostics (defect profile, boundary average,
    /// pointing identity).
    Diagnose,
    /// Aggregate sweep CSVs into SVG plots and a text summary.
    Report,
}

impl Command {
    fn name(&self) -> &'static str {
        match self {
            Command::Alpha0 => "alpha0",
            Command::Coupling => "coupling",
            Command::Green => "green",
            Command::LimitSolve => "limit-solve",
            Command::LimitEigs => "limit-eigs",
            Command::PerturbedSolve => "perturbed-solve",
            Command::PerturbedEigs => "perturbed-eigs",
            Command::Sweep => "sweep",
            Command::Diagnose => "diagnose",
            Command::Report => "report",
        }
    }
}

fn main() -> ExitCode {
    let args = Args::parse();
    let cfg = match &args.config {
        Some(path) => match std::fs::read_to_string(path) {
            Ok(text) => match ExperimentConfig::from_toml(&text) {
                Ok(cfg) => cfg,
                Err(e) => {
                    eprintln!("error: {e}");
                    return ExitCode::from(2);
                }
            },
            Err(e) => {
                eprintln!("error: cannot read {}: {e}", path.display());
                return ExitCode::from(2);
            }
        },
        None => cli::default_benchmark_config(),
    };
    let opts = RunOptions { out_dir: args.out.clone(), jobs: args.jobs.max(1), seed: args.seed };
    let name = args.command.name();
    match cli::run(name, &cfg, &opts) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error in stage `{name}`: {e}");
            ExitCode::FAILURE
        }
    }
}
