//! `sineq`: batch front end to the S-inequality toolkit.
//!
//! Exit codes: 0 success, 1 numerical abort or I/O failure, 2 invalid input,
//! 3 certified violation.

mod commands;
mod config;
mod output;

use std::fs::File;
use std::process::ExitCode;

use clap::Parser;

use config::{Cli, RunConfig};

const EXIT_NUMERICAL: u8 = 1;
const EXIT_VALIDATION: u8 = 2;
const EXIT_VIOLATION: u8 = 3;

fn main() -> ExitCode {
    let cli = Cli::parse();
    let cfg = match RunConfig::resolve(cli) {
        Ok(cfg) => cfg,
        Err(e) => {
            eprintln!("error: {e}");
            return ExitCode::from(EXIT_VALIDATION);
        }
    };
    let records = match commands::run(&cfg) {
        Ok(records) => records,
        Err(e) => {
            eprintln!("error: {e}");
            let code = if e.is_numerical() { EXIT_NUMERICAL } else { EXIT_VALIDATION };
            return ExitCode::from(code);
        }
    };
    let written = match &cfg.output {
        Some(path) => File::create(path).and_then(|f| output::write_records(&records, cfg.format, f)),
        None => output::write_records(&records, cfg.format, std::io::stdout().lock()),
    };
    if let Err(e) = written {
        eprintln!("error: cannot write output: {e}");
        return ExitCode::from(EXIT_NUMERICAL);
    }
    if records.iter().any(|r| r.is_violation()) {
        eprintln!("certified violation");
        return ExitCode::from(EXIT_VIOLATION);
    }
    ExitCode::SUCCESS
}
