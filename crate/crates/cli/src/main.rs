mod commands;
mod config;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};

use commands::Outcome;
use config::Backend;

/// Krylov variational Green's functions for Anderson impurity models.
#[derive(Debug, Parser)]
#[command(version, about)]
pub struct Cli {
    #[command(subcommand)]
    command: Command,

    /// JSON config document (or a manifest of an earlier run).
    #[arg(long, global = true)]
    config: Option<PathBuf>,

    /// Output directory.
    #[arg(long, global = true, default_value = "kvqa-out")]
    out: PathBuf,

    #[arg(long, global = true)]
    seed: Option<u64>,

    #[arg(long, global = true, value_enum)]
    backend: Option<Backend>,

    /// Comma-separated layer counts, e.g. `2,4,6`.
    #[arg(long, global = true, value_delimiter = ',')]
    layers: Option<Vec<usize>>,

    /// Worker threads (defaults to all cores).
    #[arg(long, global = true)]
    jobs: Option<usize>,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Green's function of one model: VQE, KVQA and assembly, or the oracle.
    SolveGf,
    /// Relative Green's-function error over random models and layer counts.
    BenchmarkGf,
    /// Relative error of the iterative Hamiltonian moments.
    BenchmarkMoments,
    /// Bethe-lattice DMFT loop.
    Dmft,
    /// Parse and check a config without running anything.
    ValidateConfig {
        #[arg(long, value_enum)]
        kind: ConfigKind,
    },
}

#[derive(Debug, Clone, Copy, ValueEnum)]
pub enum ConfigKind {
    SolveGf,
    BenchmarkGf,
    BenchmarkMoments,
    Dmft,
}

#[derive(Debug)]
pub enum CliError {
    Config(String),
    Run(kvqa::Error),
}

impl From<kvqa::Error> for CliError {
    fn from(e: kvqa::Error) -> Self {
        CliError::Run(e)
    }
}

const EXIT_CONFIG: u8 = 2;
const EXIT_NOT_CONVERGED: u8 = 3;

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = Cli::parse();
    if let Some(n) = cli.jobs {
        if let Err(e) = rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build_global()
        {
            eprintln!("error: cannot start {n} workers: {e}");
            return ExitCode::from(EXIT_CONFIG);
        }
    }
    let result = match cli.command {
        Command::SolveGf => commands::solve_gf(&cli),
        Command::BenchmarkGf => commands::benchmark_gf(&cli),
        Command::BenchmarkMoments => commands::benchmark_moments(&cli),
        Command::Dmft => commands::dmft(&cli),
        Command::ValidateConfig { kind } => commands::validate_config(&cli, kind),
    };
    match result {
        Ok(Outcome::Done) => ExitCode::SUCCESS,
        Ok(Outcome::NotConverged(msg)) => {
            eprintln!("warning: {msg}");
            ExitCode::from(EXIT_NOT_CONVERGED)
        }
        Err(CliError::Config(msg)) => {
            eprintln!("config error: {msg}");
            ExitCode::from(EXIT_CONFIG)
        }
        Err(CliError::Run(e @ kvqa::Error::NotConverged(_))) => {
            eprintln!("error: {e}");
            ExitCode::from(EXIT_NOT_CONVERGED)
        }
        Err(CliError::Run(e)) => {
            eprintln!("error: {e}");
            ExitCode::FAILURE
        }
    }
}
