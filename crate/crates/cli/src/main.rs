//! `robust-erm`: fit robust linear models and reproduce the simulation
//! studies from the command line. Results are written as CSV (authoritative)
//! and SVG (illustrative) under `--out-dir`.
//!
//! Exit codes: 0 on success, 2 for usage or configuration errors, 3 for
//! runtime or numerical failures.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

mod args;
mod commands;
mod svg;

use std::process::ExitCode;

use clap::Parser;
use thiserror::Error;

use args::{Cli, Settings};

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error("{0}")]
    Runtime(String),
}

impl CliError {
    fn exit_code(&self) -> u8 {
        match self {
            CliError::Usage(_) => 2,
            CliError::Runtime(_) => 3,
        }
    }

    /// Prefixes the message with where the failure happened.
    pub fn context(self, what: &str) -> Self {
        match self {
            CliError::Usage(m) => CliError::Usage(format!("{what}: {m}")),
            CliError::Runtime(m) => CliError::Runtime(format!("{what}: {m}")),
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match cli.with_config_file().and_then(Settings::resolve).and_then(|s| commands::run(&s)) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
