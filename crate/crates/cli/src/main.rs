//! `dickman`: command-line front end for the numerics library.

mod commands;
mod output;

use std::process::ExitCode;

use clap::error::ErrorKind;
use clap::Parser;

use commands::Command;
use output::Sink;

const EXIT_DOMAIN: u8 = 1;
const EXIT_VERIFICATION: u8 = 2;
const EXIT_USAGE: u8 = 64;

#[derive(Debug, Parser)]
#[command(name = "dickman", version, about = "Dickman subordinator, renewal densities and disordered-system second moments")]
struct Cli {
    /// Output format (`csv`, `json`) or a file path; the extension of a path picks the format.
    #[arg(long, global = true)]
    out: Option<String>,

    /// Worker threads.
    #[arg(long, global = true, env = "DICKMAN_THREADS", default_value_t = 1)]
    threads: usize,

    #[command(subcommand)]
    command: Command,
}

/// Why a run did not succeed.
#[derive(Debug)]
pub enum Failure {
    Domain(String),
    Verification(String),
    Io(std::io::Error),
}

impl From<dickman::Error> for Failure {
    fn from(e: dickman::Error) -> Self {
        Failure::Domain(e.to_string())
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => 0,
                _ => EXIT_USAGE,
            };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    if cli.threads == 0 {
        eprintln!("error: --threads must be at least 1");
        return ExitCode::from(EXIT_USAGE);
    }
    if let Err(e) = rayon::ThreadPoolBuilder::new().num_threads(cli.threads).build_global() {
        eprintln!("error: could not start the worker pool: {e}");
        return ExitCode::from(EXIT_DOMAIN);
    }
    let sink = Sink::parse(cli.out.as_deref());
    let (report, verdict) = match commands::run(&cli.command) {
        Ok(r) => r,
        Err(Failure::Domain(msg)) => {
            eprintln!("error: {msg}");
            return ExitCode::from(EXIT_DOMAIN);
        }
        Err(Failure::Verification(msg)) => {
            eprintln!("verification failed: {msg}");
            return ExitCode::from(EXIT_VERIFICATION);
        }
        Err(Failure::Io(e)) => {
            eprintln!("error: {e}");
            return ExitCode::from(EXIT_DOMAIN);
        }
    };
    if let Err(e) = report.emit(&sink) {
        eprintln!("error: {e}");
        return ExitCode::from(EXIT_DOMAIN);
    }
    match verdict {
        Some(msg) => {
            eprintln!("verification failed: {msg}");
            ExitCode::from(EXIT_VERIFICATION)
        }
        None => ExitCode::SUCCESS,
    }
}
