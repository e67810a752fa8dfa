// SPDX-License-Identifier: Apache-2.0

//! Config-driven experiment runner for the `mockq` library.
//!
//! A TOML file names one experiment, the model and the numerics. It is
//! validated into a [`config::Plan`] before anything is written; a run then
//! fills its output directory with delimited tables and a `manifest.json`
//! carrying SHA-256 hashes of every artifact.

pub mod config;
pub mod error;
pub mod experiments;
pub mod runner;

pub use config::{ExperimentConfig, ExperimentKind, Plan, OUTPUT_ROOT_ENV};
pub use error::{CliError, Result};
pub use runner::{run, run_in, sweep, RunRecord, RunStatus, SweepRecord};

#[cfg(doctest)]
#[doc = include_str!("../../../book/src/runner.md")]
mod runner_guide {}
