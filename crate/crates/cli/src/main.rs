//! `strat`: train, evaluate, stress-test and bias-shift linear classifiers
//! that must withstand strategic feature manipulation under an uncertain
//! movement cost.

mod commands;
mod config;
mod error;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

use commands::HardnessMode;
use config::ExperimentConfig;
use error::{CliError, CliResult};

#[derive(Parser)]
#[command(
    name = "strat",
    version,
    about = "Cost-robust strategic classification experiments"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct CommonArgs {
    /// Experiment configuration file
    #[arg(long)]
    config: PathBuf,
    /// Output directory (overrides the configured one)
    #[arg(long)]
    out: Option<PathBuf>,
    /// Upper bound on worker threads (compute kernels are single-threaded
    /// and deterministic, so any cap >= 1 is honored)
    #[arg(long, default_value_t = 1)]
    threads: usize,
}

#[derive(Subcommand)]
enum Command {
    /// Solve the worst-case training objective; writes model.csv,
    /// report.csv and certificate.txt
    Train(CommonArgs),
    /// Evaluate a saved model's worst-case risks; writes eval.csv
    Eval {
        #[command(flatten)]
        common: CommonArgs,
        /// Model file written by `strat train`
        #[arg(long)]
        model: PathBuf,
    },
    /// Cost-misspecification experiments; writes curve CSVs
    Hardness {
        #[arg(value_enum)]
        mode: HardnessArg,
        #[command(flatten)]
        common: CommonArgs,
    },
    /// Shift a model's bias for a single known cost; writes
    /// shifted_model.csv and a verification line
    Shift {
        #[command(flatten)]
        common: CommonArgs,
        /// Model file written by `strat train`
        #[arg(long)]
        model: PathBuf,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum HardnessArg {
    Twoplane,
    GaussianCurve,
}

fn prepare(common: &CommonArgs) -> CliResult<(ExperimentConfig, PathBuf)> {
    if common.threads < 1 {
        return Err(CliError::config("--threads must be at least 1"));
    }
    let config = ExperimentConfig::load(&common.config)?;
    let out_dir = common
        .out
        .clone()
        .or_else(|| config.output_dir())
        .unwrap_or_else(|| PathBuf::from("."));
    std::fs::create_dir_all(&out_dir)?;
    Ok((config, out_dir))
}

fn run(cli: Cli) -> CliResult<()> {
    match &cli.command {
        Command::Train(common) => {
            let (config, out) = prepare(common)?;
            commands::cmd_train(&config, &out)
        }
        Command::Eval { common, model } => {
            let (config, out) = prepare(common)?;
            commands::cmd_eval(&config, model, &out)
        }
        Command::Hardness { mode, common } => {
            let (config, out) = prepare(common)?;
            let mode = match mode {
                HardnessArg::Twoplane => HardnessMode::TwoPlane,
                HardnessArg::GaussianCurve => HardnessMode::GaussianCurve,
            };
            commands::cmd_hardness(&config, mode, &out)
        }
        Command::Shift { common, model } => {
            let (config, out) = prepare(common)?;
            commands::cmd_shift(&config, model, &out)
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(err) => {
            eprintln!("{err}");
            ExitCode::from(err.exit_code())
        }
    }
}
