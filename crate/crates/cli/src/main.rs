mod commands;
mod config;
mod emit;

use std::process::ExitCode;

use clap::Parser;

use crate::commands::{run, Failure};
use crate::config::{Cli, Format};

const EXIT_INTERNAL: u8 = 1;
const EXIT_USAGE: u8 = 2;
const EXIT_CHECK_FAILED: u8 = 3;

/// Environment variable bounding the worker threads.
const THREADS_VAR: &str = "SHAPOFORM_THREADS";

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { EXIT_USAGE } else { 0 });
        }
    };
    if let Ok(n) = std::env::var(THREADS_VAR) {
        match n.parse::<usize>() {
            Ok(n) if n > 0 => {
                let _ = rayon::ThreadPoolBuilder::new().num_threads(n).build_global();
            }
            _ => {
                eprintln!("error: {THREADS_VAR} must be a positive integer, got `{n}`");
                return ExitCode::from(EXIT_USAGE);
            }
        }
    }
    let report = match run(&cli.command) {
        Ok(r) => r,
        Err(Failure::Usage(msg)) => {
            eprintln!("error: {msg}");
            return ExitCode::from(EXIT_USAGE);
        }
        Err(Failure::Math(msg)) => {
            eprintln!("error: {msg}");
            return ExitCode::from(EXIT_CHECK_FAILED);
        }
        Err(Failure::Internal(msg)) => {
            eprintln!("error: {msg}");
            return ExitCode::from(EXIT_INTERNAL);
        }
    };
    let rendered = match cli.format {
        Format::Json => serde_json::to_string_pretty(&report.json).expect("serializable report") + "\n",
        Format::Text => report.text.clone(),
    };
    print!("{rendered}");
    if let Some(path) = &cli.out {
        if let Err(e) = std::fs::write(path, &rendered) {
            eprintln!("error: cannot write {}: {e}", path.display());
            return ExitCode::from(EXIT_INTERNAL);
        }
    }
    if report.ok {
        ExitCode::SUCCESS
    } else {
        ExitCode::from(EXIT_CHECK_FAILED)
    }
}
