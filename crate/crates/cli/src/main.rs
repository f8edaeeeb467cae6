use std::process::ExitCode;

use clap::Parser;
use segproj::cli::Cli;
use segproj::InvariantViolation;

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 1 } else { 0 });
        }
    };
    match segproj::commands::run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e:#}");
            if e.is::<InvariantViolation>() {
                ExitCode::from(2)
            } else {
                ExitCode::from(1)
            }
        }
    }
}
