//! Command-line runner for the `lmoments` experiments.
//!
//! Exit codes: 0 success, 1 runtime failure, 2 an inequality check reported
//! `holds = false`, 3 unknown configuration key, 4 invalid value, 5 malformed value.

pub mod config;
pub mod report;
pub mod run;

use std::ffi::OsString;
use std::fs::File;
use std::io::{self, BufWriter, Write};

use anyhow::Context;
use clap::error::ErrorKind;
use clap::Parser;

use config::{Cli, ConfigError, RunConfig};

pub const EXIT_OK: u8 = 0;
pub const EXIT_RUNTIME: u8 = 1;
pub const EXIT_VIOLATION: u8 = 2;

/// Parses `args` (program name first), runs, writes the report and returns the exit code.
pub fn main_with_args<I, T>(args: I) -> u8
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => EXIT_OK,
                ErrorKind::UnknownArgument => ConfigError::UNKNOWN_KEY_EXIT,
                ErrorKind::InvalidValue | ErrorKind::ValueValidation => ConfigError::MALFORMED_EXIT,
                _ => ConfigError::INVALID_EXIT,
            };
            let _ = e.print();
            return code;
        }
    };
    let cfg = match config::resolve(cli) {
        Ok(cfg) => cfg,
        Err(e) => {
            eprintln!("error: {e}");
            return e.exit_code();
        }
    };
    match execute(&cfg) {
        Ok(true) => EXIT_OK,
        Ok(false) => {
            eprintln!("an inequality check reported holds = false");
            EXIT_VIOLATION
        }
        Err(e) => {
            eprintln!("error: {e:#}");
            EXIT_RUNTIME
        }
    }
}

/// Runs the configuration and writes its report; `Ok(false)` flags an inequality violation.
pub fn execute(cfg: &RunConfig) -> anyhow::Result<bool> {
    let outcome = run::run(cfg)?;
    match &cfg.out {
        Some(path) => {
            let file = File::create(path).with_context(|| format!("cannot write report to {}", path.display()))?;
            let mut out = BufWriter::new(file);
            outcome.report.write(cfg, &mut out)?;
            out.flush().with_context(|| format!("cannot write report to {}", path.display()))?;
        }
        None => {
            let stdout = io::stdout();
            outcome.report.write(cfg, stdout.lock())?;
        }
    }
    Ok(!outcome.violation)
}
