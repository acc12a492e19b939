//! Experiment runner for `bandcorr`: configuration, result files and the
//! acceptance suite.

pub mod args;
pub mod commands;
pub mod config;
mod error;
pub mod output;
pub mod plot;
pub mod verify;
pub mod wick;

pub use error::CliError;

use args::Cli;
use config::ExperimentConfig;
use output::OutDir;

/// Builds the effective configuration: file (or defaults), then flags.
pub fn effective_config(cli: &Cli) -> Result<ExperimentConfig, CliError> {
    let mut cfg = match &cli.common.config {
        Some(path) => ExperimentConfig::load(path)?,
        None => ExperimentConfig::default(),
    };
    cli.common.apply(&mut cfg);
    cli.command.apply(&mut cfg);
    Ok(cfg)
}

/// Runs a parsed command line and returns the summary line.
pub fn run(cli: &Cli) -> Result<String, CliError> {
    let cfg = effective_config(cli)?;
    let kind = cli.command.kind();
    cfg.validate(kind)?;
    let work = || -> Result<String, CliError> {
        let mut out = OutDir::create(&cfg.out)?;
        commands::run(kind, &cfg, &mut out)
    };
    match cfg.threads {
        Some(n) => rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build()
            .map_err(|e| error::usage("threads", e.to_string()))?
            .install(work),
        None => work(),
    }
}
