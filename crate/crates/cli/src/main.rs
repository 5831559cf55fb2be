//! `cs-minimax` command-line front end.
//!
//! Exit codes: 0 success, 1 validation failure, 2 usage error,
//! 3 numerical failure.

mod args;
mod commands;
mod output;

use std::process::ExitCode;

use clap::Parser;
use thiserror::Error;

use args::{Cli, Command, OutputArgs};
use output::Output;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error(transparent)]
    Numerical(cs_minimax::Error),
    #[error("cannot write output: {0}")]
    Io(#[from] std::io::Error),
}

impl From<cs_minimax::Error> for CliError {
    fn from(e: cs_minimax::Error) -> Self {
        match e {
            cs_minimax::Error::InvalidArgument(msg) => CliError::Usage(msg),
            other => CliError::Numerical(other),
        }
    }
}

impl CliError {
    fn code(&self) -> u8 {
        match self {
            CliError::Usage(_) => 2,
            CliError::Numerical(_) | CliError::Io(_) => 3,
        }
    }
}

fn emit(out: Output, args: &OutputArgs) -> Result<(), CliError> {
    out.write(args.format, args.out.as_deref())?;
    Ok(())
}

fn run(cli: Cli) -> Result<bool, CliError> {
    if let Some(n) = cli.threads {
        rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build_global()
            .map_err(|e| CliError::Usage(format!("thread pool: {e}")))?;
    }
    match &cli.command {
        Command::ScalarRisk(a) => emit(commands::scalar_risk(a, false)?, &a.output)?,
        Command::WeakRisk(a) => emit(commands::scalar_risk(a, true)?, &a.output)?,
        Command::Minimax(a) => emit(commands::minimax_cmd(a)?, &a.output)?,
        Command::Se(a) => emit(commands::se(a)?, &a.output)?,
        Command::Calibrate(a) => emit(commands::calibrate(a)?, &a.output)?,
        Command::Amp(a) => emit(commands::amp(a)?, &a.output)?,
        Command::Lasso(a) => emit(commands::lasso(a)?, &a.output)?,
        Command::Validate(a) => {
            let (out, ok) = commands::validate(a)?;
            emit(out, &a.output)?;
            return Ok(ok);
        }
    }
    Ok(true)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.code())
        }
    }
}
