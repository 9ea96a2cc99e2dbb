//! `gss` command-line harness: rate tables, constructions, exhaustive
//! verification, oracle sweeps and stochastic simulation.
//!
//! Exit codes: 0 success/PASS, 1 verification FAIL or oracle MISMATCH,
//! 2 usage or input error, 3 search budget exceeded.

pub mod args;
pub mod commands;
pub mod report;

use std::fs;
use std::time::Instant;

use thiserror::Error;

pub use args::{Cli, Command, Format};
use gss_core::Budget;
pub use report::{CommandOutput, RunReport};

pub const EXIT_OK: u8 = 0;
pub const EXIT_FAIL: u8 = 1;
pub const EXIT_USAGE: u8 = 2;
pub const EXIT_BUDGET: u8 = 3;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error(transparent)]
    Core(#[from] gss_core::Error),
    #[error("{0}")]
    Io(String),
}

impl CliError {
    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Core(gss_core::Error::BudgetExceeded { .. }) => EXIT_BUDGET,
            _ => EXIT_USAGE,
        }
    }
}

impl From<std::io::Error> for CliError {
    fn from(err: std::io::Error) -> Self {
        CliError::Io(err.to_string())
    }
}

/// Enumeration cap from `GSS_BUDGET`, falling back to the library default.
pub fn budget_from_env() -> Result<Budget, CliError> {
    match std::env::var("GSS_BUDGET") {
        Ok(v) => v
            .trim()
            .parse()
            .map(Budget)
            .map_err(|_| CliError::Usage(format!("GSS_BUDGET must be a non-negative integer, got {v:?}"))),
        Err(_) => Ok(Budget::DEFAULT),
    }
}

/// Executes the command and writes its output; returns the process exit code.
pub fn run(cli: &Cli) -> Result<u8, CliError> {
    let started = Instant::now();
    let output = commands::execute(cli)?;
    let format = cli.format.unwrap_or_else(|| cli.command.default_format());
    let text = match format {
        Format::Csv => output.csv.clone(),
        Format::Json => {
            let report = RunReport::new(&output, started.elapsed());
            let mut s = serde_json::to_string_pretty(&report).expect("report serializes");
            s.push('\n');
            s
        }
    };
    match &cli.out {
        Some(path) => fs::write(path, text)?,
        None => print!("{text}"),
    }
    if let Some(summary) = &output.summary {
        eprintln!("{summary}");
    }
    Ok(if output.passed { EXIT_OK } else { EXIT_FAIL })
}
