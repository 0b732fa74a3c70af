//! File-level tooling around the `coopstore` codes: shard files, configs,
//! reports and the subcommands that drive them.

pub mod commands;
pub mod config;
pub mod report;
pub mod shard_file;

use std::path::Path;

use thiserror::Error;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("config: {0}")]
    Config(String),
    #[error(transparent)]
    Code(#[from] coopstore::error::Error),
    #[error("{path}: {source}")]
    Io { path: String, source: std::io::Error },
    #[error("{0}")]
    Format(String),
}

impl CliError {
    pub fn io(path: &Path, source: std::io::Error) -> Self {
        CliError::Io { path: path.display().to_string(), source }
    }
}

/// Exit status: 0 pass, 1 a verification row failed, 2 usage or config error.
pub mod exit {
    pub const PASS: u8 = 0;
    pub const FAILED: u8 = 1;
    pub const USAGE: u8 = 2;
}
