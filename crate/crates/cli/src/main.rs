// SPDX-License-Identifier: Apache-2.0

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use serde_json::json;

use mockq_cli::{run, sweep, CliError, ExperimentConfig};

#[derive(Parser)]
#[command(name = "mockq", version, about = "Run mockq experiments from TOML configs")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run one experiment.
    Run { config: PathBuf },
    /// Run one experiment per value of a dotted parameter path.
    Sweep {
        config: PathBuf,
        #[arg(long)]
        param: String,
        /// Comma-separated values; an empty list runs nothing.
        #[arg(long, value_delimiter = ',', num_args = 0..)]
        values: Vec<String>,
    },
    /// Check a config without running it.
    Validate { config: PathBuf },
}

fn dispatch(command: Command) -> Result<serde_json::Value, CliError> {
    match command {
        Command::Run { config } => {
            let record = run(&ExperimentConfig::load(&config)?)?;
            Ok(json!({
                "status": record.status,
                "output_dir": record.output_dir,
                "content_hash": record.content_hash,
                "headline": record.headline,
            }))
        }
        Command::Sweep { config, param, values } => {
            let values: Vec<String> = values.into_iter().map(|v| v.trim().to_string()).filter(|v| !v.is_empty()).collect();
            let record = sweep(&ExperimentConfig::load(&config)?, &param, &values)?;
            let failed = record.failures();
            if failed > 0 {
                return Err(CliError::Sweep(format!("{failed} of {} points failed", record.points.len())));
            }
            Ok(json!({ "status": "complete", "points": record.points.len() }))
        }
        Command::Validate { config } => {
            let cfg = ExperimentConfig::load(&config)?;
            cfg.validate()?;
            Ok(json!({
                "status": "valid",
                "experiment": cfg.experiment,
                "config_hash": cfg.hash(),
                "output_dir": cfg.output_dir(),
            }))
        }
    }
}

fn main() -> ExitCode {
    match dispatch(Cli::parse().command) {
        Ok(summary) => {
            println!("{summary}");
            ExitCode::SUCCESS
        }
        Err(e) => {
            eprintln!("{}", json!({ "error": { "kind": e.kind(), "message": e.to_string() } }));
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
