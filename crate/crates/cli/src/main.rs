//! `bellcut`: Bell inequalities, cut polytopes and elliptopes from the
//! command line. Results are JSON on standard output; multi-result
//! commands stream JSON lines behind a header line.

mod commands;
mod io;

use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::PathBuf;
use std::process::ExitCode;

use bellcut::{Error, ErrorKind};
use clap::error::ErrorKind as ClapErrorKind;
use clap::Parser;
use serde_json::json;

use commands::Command;
use io::Context;

/// Exit status for command-line usage errors (sysexits `EX_USAGE`).
const EXIT_USAGE: u8 = 64;

#[derive(Parser)]
#[command(name = "bellcut", version, about = "Bell inequalities as facets of cut polytopes, with exact and SDP tools")]
struct Cli {
    /// Leave the timestamp out of provenance records.
    #[arg(long, global = true)]
    no_timestamp: bool,

    /// Run past size guards. The refusal reason is kept in provenance.
    #[arg(long, global = true)]
    force: bool,

    /// Print inequalities in bracket layout instead of JSON.
    #[arg(long, global = true)]
    pretty: bool,

    /// Write results to this file instead of standard output.
    #[arg(short, long, global = true, value_name = "FILE")]
    output: Option<PathBuf>,

    #[command(subcommand)]
    command: Command,
}

fn exit_code(kind: ErrorKind) -> u8 {
    match kind {
        ErrorKind::Validation => 1,
        ErrorKind::Guard => 2,
        ErrorKind::Parse => 3,
        ErrorKind::Solver => 4,
    }
}

fn kind_name(kind: ErrorKind) -> &'static str {
    match kind {
        ErrorKind::Validation => "validation",
        ErrorKind::Guard => "guard",
        ErrorKind::Parse => "parse",
        ErrorKind::Solver => "solver",
    }
}

fn report(kind: &str, message: String) {
    eprintln!("{}", json!({"error": {"kind": kind, "message": message}}));
}

fn main() -> ExitCode {
    let argv: Vec<String> = std::env::args().collect();
    let cli = match Cli::try_parse_from(&argv) {
        Ok(cli) => cli,
        Err(e) if matches!(e.kind(), ClapErrorKind::DisplayHelp | ClapErrorKind::DisplayVersion) => {
            let _ = e.print();
            return ExitCode::SUCCESS;
        }
        Err(e) => {
            let _ = e.print();
            report("usage", e.kind().to_string());
            return ExitCode::from(EXIT_USAGE);
        }
    };
    let out: Box<dyn Write> = match &cli.output {
        Some(path) => match File::create(path) {
            Ok(f) => Box::new(BufWriter::new(f)),
            Err(e) => {
                let err = Error::Invalid(format!("cannot create {}: {e}", path.display()));
                report("validation", err.to_string());
                return ExitCode::from(exit_code(err.kind()));
            }
        },
        None => Box::new(std::io::stdout().lock()),
    };
    let ctx = Context::new(argv[1..].to_vec(), !cli.no_timestamp, cli.force, cli.pretty, out);
    match commands::run(&ctx, cli.command) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            report(kind_name(e.kind()), e.to_string());
            ExitCode::from(exit_code(e.kind()))
        }
    }
}
