//! `netinfer`: generate data, train estimators, run the least-squares
//! baseline, analyze results and sweep parameters, all from one TOML
//! configuration file.

mod config;
mod output;
mod run;
mod sweep;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

/// Why a command stopped. Configuration problems exit with 1, failures
/// during the work itself with 2.
#[derive(Debug)]
pub enum Failure {
    Config(anyhow::Error),
    Runtime(anyhow::Error),
}

impl Failure {
    fn exit_code(&self) -> u8 {
        match self {
            Failure::Config(_) => 1,
            Failure::Runtime(_) => 2,
        }
    }
}

impl std::fmt::Display for Failure {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Failure::Config(e) => write!(f, "configuration error: {e:#}"),
            Failure::Runtime(e) => write!(f, "{e:#}"),
        }
    }
}

/// Tags an error with the exit class it belongs to.
pub trait Classify<T> {
    fn config(self) -> Result<T, Failure>;
    fn runtime(self) -> Result<T, Failure>;
}

impl<T, E: Into<anyhow::Error>> Classify<T> for Result<T, E> {
    fn config(self) -> Result<T, Failure> {
        self.map_err(|e| Failure::Config(e.into()))
    }

    fn runtime(self) -> Result<T, Failure> {
        self.map_err(|e| Failure::Runtime(e.into()))
    }
}

#[derive(Parser)]
#[command(name = "netinfer", version, about = "Infer network adjacency matrices from dynamics time series")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Clone)]
pub struct Common {
    /// Run configuration (TOML).
    #[arg(long)]
    config: PathBuf,
    /// Output directory; overrides `out` in the configuration.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Seed for the network, the data and training; overrides `seed`.
    #[arg(long)]
    seed: Option<u64>,
}

#[derive(Args, Clone)]
struct DataArgs {
    /// Directory holding generated data; defaults to the output directory.
    #[arg(long)]
    data: Option<PathBuf>,
}

#[derive(Subcommand)]
enum Command {
    /// Build the ground-truth network and simulate observations.
    Generate(Common),
    /// Train the estimator on generated data.
    Train {
        #[command(flatten)]
        common: Common,
        #[command(flatten)]
        data: DataArgs,
    },
    /// Least-squares network estimate with its identifiability report.
    InferOls {
        #[command(flatten)]
        common: Common,
        #[command(flatten)]
        data: DataArgs,
    },
    /// Statistic distributions, uncertainty bands, comparisons and timing.
    Analyze {
        /// Run configuration; defaults to the one archived with the data.
        #[arg(long)]
        config: Option<PathBuf>,
        #[arg(long)]
        out: PathBuf,
        #[command(flatten)]
        data: DataArgs,
    },
    /// Run the full pipeline over the Cartesian product of the sweep axes.
    Sweep {
        #[command(flatten)]
        common: Common,
        /// Runs executed at once.
        #[arg(long, default_value_t = 1)]
        workers: usize,
    },
}

fn dispatch(command: Command) -> Result<(), Failure> {
    match command {
        Command::Generate(common) => {
            let (config, out) = run::load(&common)?;
            run::generate(&config, &out).map(|_| ())
        }
        Command::Train { common, data } => {
            let (config, out) = run::load(&common)?;
            run::train(&config, data.data.as_deref().unwrap_or(&out), &out).map(|_| ())
        }
        Command::InferOls { common, data } => {
            let (config, out) = run::load(&common)?;
            run::infer_ols(&config, data.data.as_deref().unwrap_or(&out), &out).map(|_| ())
        }
        Command::Analyze { config, out, data } => {
            let data_dir = data.data.unwrap_or_else(|| out.clone());
            let config = run::load_for_analysis(config.as_deref(), &data_dir)?;
            run::analyze(config.as_ref(), &data_dir, &out).map(|_| ())
        }
        Command::Sweep { common, workers } => sweep::sweep(&common, workers),
    }
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = Cli::parse();
    match dispatch(cli.command) {
        Ok(()) => ExitCode::SUCCESS,
        Err(failure) => {
            eprintln!("netinfer: {failure}");
            ExitCode::from(failure.exit_code())
        }
    }
}
