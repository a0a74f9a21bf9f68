use std::process::ExitCode;

use clap::Parser;
use kahler_lift_cli::{execute, Cli, EXIT_USAGE};

fn main() -> ExitCode {
    match execute(Cli::parse()) {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(EXIT_USAGE)
        }
    }
}
