use std::process::ExitCode;

use clap::Parser;
use covering_cli::{execute, RunConfig};

fn main() -> ExitCode {
    let config = RunConfig::parse();
    match execute(&config) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("covering-lab: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
