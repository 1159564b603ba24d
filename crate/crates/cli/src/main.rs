//! `staticdom`: verification suites, domain classification and
//! Schwarzschild scans on the command line.
//!
//! Exit status 0 means success (all checks pass, the domain is
//! non-generic, or no forbidden table cell occurs), 1 means the computed
//! answer is negative or a computation failed, and 2 means the invocation
//! was invalid.

mod args;
mod commands;
mod config;
mod emit;
mod verify;

use std::process::ExitCode;

use clap::Parser;

use args::{Cli, Command};
use commands::Failure;

/// Cap rayon's pool from `STATICDOM_THREADS` when set.
fn configure_threads() -> Result<(), Failure> {
    let Ok(raw) = std::env::var("STATICDOM_THREADS") else {
        return Ok(());
    };
    let n: usize = raw
        .trim()
        .parse()
        .ok()
        .filter(|n| *n > 0)
        .ok_or_else(|| Failure::Invalid(format!("STATICDOM_THREADS must be a positive integer, got {raw:?}")))?;
    rayon::ThreadPoolBuilder::new()
        .num_threads(n)
        .build_global()
        .map_err(|e| Failure::Runtime(e.to_string()))
}

fn dispatch(cli: &Cli) -> Result<u8, Failure> {
    configure_threads()?;
    let (report, out) = match &cli.command {
        Command::Verify(a) => (commands::verify(a)?, &a.output.out),
        Command::Classify(a) => (commands::classify(a)?, &a.output.out),
        Command::Scan(a) => (commands::scan(a)?, &a.output.out),
        Command::Table(a) => (commands::table(a)?, &a.output.out),
    };
    emit::deliver(&report.text, out.as_deref()).map_err(|e| Failure::Runtime(e.to_string()))?;
    Ok(report.status)
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 2 } else { 0 });
        }
    };
    match dispatch(&cli) {
        Ok(code) => ExitCode::from(code),
        Err(Failure::Invalid(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
        Err(Failure::Runtime(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(1)
        }
    }
}
