//! `tsad-eval` command-line front end.
//!
//! Exit codes: 0 success, 1 I/O failure, 2 invalid flags or inputs.

mod args;
mod commands;

use std::process::ExitCode;

use clap::Parser;

use args::{Cli, Command};

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error(transparent)]
    Eval(#[from] tsad_eval::Error),
}

impl CliError {
    fn exit_code(&self) -> u8 {
        match self {
            CliError::Eval(e) if e.is_io() => 1,
            _ => 2,
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match &cli.command {
        Command::Evaluate(args) => commands::evaluate_cmd(args),
        Command::Curves(args) => commands::curves_cmd(args),
        Command::Simulate(args) => commands::simulate_cmd(args),
        Command::Cases(args) => commands::cases_cmd(args),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
