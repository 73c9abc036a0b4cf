use std::process::ExitCode;

use clap::Parser;

mod cli;
mod commands;
mod config;
mod output;

#[derive(Debug)]
pub enum CliError {
    /// Bad flags, bad config, unusable combination of options.
    Usage(String),
    /// Unreadable input or parameters outside a model's domain.
    Data(String),
}

impl From<crackecon::Error> for CliError {
    fn from(e: crackecon::Error) -> Self {
        CliError::Data(e.to_string())
    }
}

fn main() -> ExitCode {
    let cli = match cli::Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match commands::run(cli.command) {
        Ok(()) => ExitCode::SUCCESS,
        Err(CliError::Usage(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(1)
        }
        Err(CliError::Data(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
    }
}
