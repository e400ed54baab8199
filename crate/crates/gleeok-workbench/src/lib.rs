//! The `gleeok` command-line workbench.
//!
//! Each subcommand produces a [`Report`]: header lines with the tool
//! version, the digest of the conventions document and every effective
//! setting, then data lines and a final `status` line. [`run`] maps the
//! outcome to an exit code: 0 pass, 1 check failed, 2 usage error, 3
//! external solver unavailable.

pub mod cli;
mod commands;
pub mod config;
mod error;
pub mod integral;
mod report;

use std::ffi::OsString;

use clap::Parser;

pub use commands::{build_model, command_name, execute, DEFAULT_KEYS, DEFAULT_SAMPLES_LOG2};
pub use config::{parse_config, FileConfig, Settings, DEFAULT_SEED};
pub use error::WorkbenchError;
pub use report::{conventions_digest, Report, Status, CONVENTIONS};

/// Parses arguments, runs the command and returns the rendered report with
/// its exit code.
pub fn run_to_string<I, T>(args: I) -> (i32, String)
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match cli::Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            return (code, e.render().to_string());
        }
    };
    match run_cli(&cli) {
        Ok(report) => {
            let code = if report.status == Status::Pass { 0 } else { 1 };
            (code, report.to_string())
        }
        Err(e) => (e.exit_code(), format!("error: {e}")),
    }
}

fn run_cli(cli: &cli::Cli) -> Result<Report, WorkbenchError> {
    let settings = Settings::resolve(&cli.global)?;
    let report = match settings.threads {
        Some(n) => rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build()
            .map_err(|e| WorkbenchError::Failed(e.to_string()))?
            .install(|| execute(&cli.command, &settings))?,
        None => execute(&cli.command, &settings)?,
    };
    if let Some(path) = &settings.output {
        std::fs::write(path, format!("{report}\n"))?;
    }
    Ok(report)
}
