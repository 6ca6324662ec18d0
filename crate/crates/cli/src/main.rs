use std::path::Path;
use std::process::ExitCode;

use biharmonic::Error;
use clap::Parser;

mod args;
mod commands;
mod config;
mod report;
mod sweep;

use args::{Cli, Command, Format};
use config::FileConfig;

/// Exit status for malformed or out-of-domain input.
const EXIT_INPUT: u8 = 2;
/// Exit status when a computation ran but one of its checks failed.
const EXIT_CHECK: u8 = 3;

/// Invalid command-line or config-file input detected by the front end itself.
#[derive(Debug, thiserror::Error)]
#[error("{0}")]
pub struct InputError(pub String);

/// Merged global options shared by every command.
pub struct Ctx {
    pub file: FileConfig,
    format: Option<Format>,
    out: Option<std::path::PathBuf>,
}

impl Ctx {
    pub fn format(&self, default: Format) -> Format {
        self.format.or(self.file.format).unwrap_or(default)
    }

    pub fn out(&self) -> Option<&Path> {
        self.out.as_deref().or(self.file.out.as_deref())
    }
}

fn is_input_error(e: &anyhow::Error) -> bool {
    e.chain().any(|c| {
        c.is::<InputError>()
            || matches!(
                c.downcast_ref::<Error>(),
                Some(
                    Error::InvalidParams(_)
                        | Error::SubcriticalInput { .. }
                        | Error::NoPcValue { .. }
                        | Error::DomainError(_)
                )
            )
    })
}

fn run(cli: Cli) -> anyhow::Result<bool> {
    let file = match &cli.config {
        Some(path) => FileConfig::load(path)?,
        None => FileConfig::default(),
    };
    let ctx = Ctx { file, format: cli.format, out: cli.out };
    match &cli.command {
        Command::Spectrum(a) => commands::spectrum(a, &ctx),
        Command::Critical(a) => commands::critical(a, &ctx),
        Command::Solve(a) => commands::solve(a, &ctx),
        Command::Expand(a) => commands::expand(a, &ctx),
        Command::Verify(a) => commands::verify(a, &ctx),
        Command::Sweep(a) => sweep::sweep(a, &ctx),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => {
            eprintln!("error: one or more checks failed");
            ExitCode::from(EXIT_CHECK)
        }
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(if is_input_error(&e) { EXIT_INPUT } else { 1 })
        }
    }
}
