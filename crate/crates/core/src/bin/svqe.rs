use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use svqe_core::commands;
use svqe_core::config::ExperimentConfig;
use svqe_core::Error;

#[derive(Parser)]
#[command(name = "svqe", version, about = "Two-qubit H2 VQE simulation with symmetry verification")]
struct Cli {
    #[command(subcommand)]
    command: Command,
    /// JSON experiment config; defaults apply when omitted.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Overrides the config seed.
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Output directory (overrides the config).
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// Worker threads.
    #[arg(long, global = true)]
    jobs: Option<usize>,
}

#[derive(Subcommand, Clone, Copy)]
enum Command {
    /// Energy landscape over θ and R.
    Landscape,
    /// CMA-ES optimization per bond distance.
    Vqe,
    /// Cumulative error budget at the converged angles.
    ErrorBudget,
    /// Relative improvements with and without positivity projection.
    Positivity,
    /// Smallest eigenvalue of reconstructions versus shot count.
    Negativity,
}

enum Failure {
    Config(String),
    Runtime(String),
}

fn classify(e: Error) -> Failure {
    match e {
        Error::Config(_) | Error::InvalidNoiseModel(_) => Failure::Config(e.to_string()),
        other => Failure::Runtime(other.to_string()),
    }
}

fn run(cli: Cli) -> Result<Vec<PathBuf>, Failure> {
    let mut cfg = match &cli.config {
        Some(path) => ExperimentConfig::load(path).map_err(classify)?,
        None => {
            let cfg = ExperimentConfig::default();
            cfg.validate().map_err(classify)?;
            cfg
        }
    };
    if let Some(seed) = cli.seed {
        cfg.seed = seed;
    }
    if let Some(out) = cli.out {
        cfg.output_dir = Some(out);
    }
    let out = cfg.output_dir.clone().unwrap_or_else(|| PathBuf::from("svqe-out"));
    std::fs::create_dir_all(&out).map_err(|e| Failure::Config(format!("cannot create {}: {e}", out.display())))?;
    if let Some(jobs) = cli.jobs {
        if jobs == 0 {
            return Err(Failure::Config("--jobs must be positive".into()));
        }
        rayon::ThreadPoolBuilder::new()
            .num_threads(jobs)
            .build_global()
            .map_err(|e| Failure::Runtime(e.to_string()))?;
    }
    let mut written = vec![commands::echo_config(&cfg, &out).map_err(|e| Failure::Config(e.to_string()))?];
    let result = match cli.command {
        Command::Landscape => commands::cmd_landscape(&cfg, &out),
        Command::Vqe => commands::cmd_vqe(&cfg, &out),
        Command::ErrorBudget => commands::cmd_error_budget(&cfg, &out),
        Command::Positivity => commands::cmd_positivity(&cfg, &out),
        Command::Negativity => commands::cmd_negativity(&cfg, &out),
    };
    written.extend(result.map_err(|e| Failure::Runtime(e.to_string()))?);
    Ok(written)
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { ExitCode::from(2) } else { ExitCode::SUCCESS };
        }
    };
    match run(cli) {
        Ok(files) => {
            for f in files {
                println!("{}", f.display());
            }
            ExitCode::SUCCESS
        }
        Err(Failure::Config(msg)) => {
            eprintln!("svqe: configuration error: {msg}");
            ExitCode::from(2)
        }
        Err(Failure::Runtime(msg)) => {
            eprintln!("svqe: runtime error: {msg}");
            ExitCode::from(3)
        }
    }
}
