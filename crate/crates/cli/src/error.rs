// SPDX-License-Identifier: Apache-2.0

use thiserror::Error;

pub type Result<T> = std::result::Result<T, CliError>;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("cannot read config {path}: {message}")]
    ConfigRead { path: String, message: String },

    #[error("invalid config: {0}")]
    Config(String),

    #[error("validation failed: {0}")]
    Validation(String),

    #[error("{experiment} experiment failed: {source}")]
    Experiment {
        experiment: String,
        #[source]
        source: mockq::Error,
    },

    #[error("sweep: {0}")]
    Sweep(String),

    #[error("i/o error on {path}: {message}")]
    Io { path: String, message: String },
}

impl CliError {
    /// Stable machine-readable tag.
    pub fn kind(&self) -> &'static str {
        match self {
            Self::ConfigRead { .. } => "config_read",
            Self::Config(_) => "config",
            Self::Validation(_) => "validation",
            Self::Experiment { .. } => "experiment",
            Self::Sweep(_) => "sweep",
            Self::Io { .. } => "io",
        }
    }

    /// Process exit code: 2 for unusable input, 1 for failed runs.
    pub fn exit_code(&self) -> i32 {
        match self {
            Self::ConfigRead { .. } | Self::Config(_) | Self::Validation(_) | Self::Sweep(_) => 2,
            Self::Experiment { .. } | Self::Io { .. } => 1,
        }
    }

    pub fn io(path: &std::path::Path, e: impl std::fmt::Display) -> Self {
        Self::Io { path: path.display().to_string(), message: e.to_string() }
    }
}

impl From<mockq::Error> for CliError {
    fn from(e: mockq::Error) -> Self {
        Self::Validation(e.to_string())
    }
}
