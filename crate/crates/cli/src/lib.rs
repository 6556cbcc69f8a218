//! Command-line harness: `sweep`, `compare`, `reconstruct` and `selfcheck`.

pub mod args;
pub mod commands;
pub mod config;
pub mod error;
pub mod selfcheck;

use std::io::Write;

pub use args::{Cli, Command, Flags};
pub use config::ExperimentConfig;
pub use error::CliError;

pub fn run(cli: &Cli, stdout: &mut dyn Write) -> Result<(), CliError> {
    let config = ExperimentConfig::resolve(&cli.flags)?;
    match cli.command {
        Command::Sweep => commands::sweep(&config, stdout),
        Command::Compare => commands::compare(&config, stdout),
        Command::Reconstruct => commands::reconstruct(&config, stdout),
        Command::Selfcheck => commands::selfcheck(&config, stdout),
    }
}
