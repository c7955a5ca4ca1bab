//! `exterior-wave <subcommand> --config <path> [--output-dir <path>] [--threads <k>]`
//!
//! Exit codes: 0 success, 1 runtime failure, 2 bad configuration,
//! 3 truncation-safety violation.

mod config;
mod error;
mod output;
mod runner;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::Parser;
use log::{error, info, LevelFilter};

use config::{RunConfig, Subcommand};
use error::CliError;

#[derive(Debug, Parser)]
#[command(name = "exterior-wave", version, about = "Radial wave experiments outside the unit ball")]
struct Args {
    #[arg(value_enum)]
    subcommand: Subcommand,
    /// JSON run configuration.
    #[arg(long)]
    config: PathBuf,
    /// Overrides `output_dir` from the config.
    #[arg(long)]
    output_dir: Option<PathBuf>,
    /// Overrides `threads` from the config.
    #[arg(long)]
    threads: Option<usize>,
    /// Log progress as well as warnings.
    #[arg(short, long)]
    verbose: bool,
}

fn run(args: Args) -> Result<(), CliError> {
    let cfg = RunConfig::load(&args.config)?.resolve(args.subcommand, args.output_dir, args.threads)?;
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(cfg.threads)
        .build()
        .map_err(|e| CliError::Config(format!("thread pool: {e}")))?;
    let mut outcome = pool.install(|| runner::execute(&cfg))?;
    let manifest = output::write_all(&cfg.output_dir, &cfg, &mut outcome.tables)?;
    info!("wrote {}", manifest.display());
    match outcome.failures.is_empty() {
        true => Ok(()),
        false => Err(CliError::Check(outcome.failures.join("; "))),
    }
}

fn main() -> ExitCode {
    let args = Args::parse();
    env_logger::Builder::new()
        .filter_level(if args.verbose { LevelFilter::Info } else { LevelFilter::Warn })
        .format_timestamp(None)
        .init();
    match run(args) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            error!("{e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
