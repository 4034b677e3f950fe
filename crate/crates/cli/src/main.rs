//! `hyperdev` command-line interface.

mod args;
mod commands;
mod input;
mod output;

use std::process::ExitCode;

use clap::Parser;

use args::Cli;

/// Failure classes mapped to process exit codes.
pub enum Outcome {
    Ok,
    VerifyFailed,
}

fn exit_code(err: &anyhow::Error) -> u8 {
    match err.downcast_ref::<hyperdev_core::Error>() {
        Some(hyperdev_core::Error::ResourceLimit { .. }) => 3,
        _ => 2,
    }
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("info"))
        .format_timestamp(None)
        .init();
    let cli = Cli::parse();
    match commands::run(cli.command) {
        Ok(Outcome::Ok) => ExitCode::SUCCESS,
        Ok(Outcome::VerifyFailed) => ExitCode::from(1),
        Err(err) => {
            eprintln!("error: {err:#}");
            ExitCode::from(exit_code(&err))
        }
    }
}
