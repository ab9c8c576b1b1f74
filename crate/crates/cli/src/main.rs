//! `fgel`: command-line access to weights, realizations, block-model samplers and counts.

mod args;
mod commands;
mod output;
mod selftest;

use clap::Parser;
use std::process::ExitCode;

/// Failure of one invocation, carrying its exit status.
#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error("{0}")]
    Lib(#[from] fgel_core::Error),
    #[error("{0}")]
    Failed(String),
}

impl CliError {
    fn code(&self) -> u8 {
        match self {
            CliError::Usage(_) => 64,
            CliError::Lib(e) if e.is_parse() => 65,
            CliError::Lib(e) if e.is_budget() => 3,
            CliError::Lib(_) => 2,
            CliError::Failed(_) => 1,
        }
    }
}

fn main() -> ExitCode {
    let cli = match args::Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 64 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match commands::run(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("fgel: {e}");
            ExitCode::from(e.code())
        }
    }
}
