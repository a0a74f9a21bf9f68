//! Command-line front end for `kahler-lift`: verification reports and profile scans.

pub mod args;
pub mod output;
pub mod report;
pub mod scan;

use std::fmt;
use std::time::Instant;

use kahler_lift::verify;

pub use args::{Cli, Command, Format, ScanArgs, VerifyArgs};

/// Exit status for a run whose checks all passed.
pub const EXIT_PASS: u8 = 0;
/// Exit status when at least one check failed.
pub const EXIT_FAIL: u8 = 1;
/// Exit status for invalid arguments, configuration, or IO failures.
pub const EXIT_USAGE: u8 = 2;

#[derive(Debug)]
pub enum CliError {
    Config(String),
    Io(std::io::Error),
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CliError::Config(m) => write!(f, "invalid configuration: {m}"),
            CliError::Io(e) => write!(f, "io error: {e}"),
        }
    }
}

impl std::error::Error for CliError {}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        CliError::Io(e)
    }
}

impl From<kahler_lift::Error> for CliError {
    fn from(e: kahler_lift::Error) -> Self {
        CliError::Config(e.to_string())
    }
}

/// Runs one parsed command and returns its exit status.
pub fn execute(cli: Cli) -> Result<u8, CliError> {
    match cli.command {
        Command::Verify(a) => run_verify(&a),
        Command::Scan(a) => run_scan(&a),
    }
}

pub fn run_verify(args: &VerifyArgs) -> Result<u8, CliError> {
    let config = args.to_config()?;
    let start = Instant::now();
    let rep = verify::run(&config)?;
    let runtime = args.timing.then(|| start.elapsed().as_secs_f64());
    let bytes = match args.format {
        Format::Json => report::to_json(&rep, runtime)?,
        Format::Text => report::to_text(&rep, runtime).into_bytes(),
    };
    let name = match args.format {
        Format::Json => "report.json",
        Format::Text => "report.txt",
    };
    output::emit(args.output.as_deref(), name, &bytes)?;
    for c in rep.checks.iter().filter(|c| !c.passed) {
        eprintln!("FAIL {}: {:e} (tolerance {:e})", c.name, c.max_residual, c.tolerance);
    }
    Ok(if rep.all_passed() { EXIT_PASS } else { EXIT_FAIL })
}

pub fn run_scan(args: &ScanArgs) -> Result<u8, CliError> {
    let table = scan::scan(args)?;
    if let Some(note) = &table.notice {
        eprintln!("{note}");
    }
    output::emit(args.output.as_deref(), "scan.csv", &table.to_csv()?)?;
    Ok(EXIT_PASS)
}
