use std::error::Error as _;
use std::process::ExitCode;

use aign::Cli;
use clap::Parser;

fn main() -> ExitCode {
    let cli = Cli::parse();
    match aign::execute(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            let mut source = e.source();
            while let Some(s) = source {
                eprintln!("  caused by: {s}");
                source = s.source();
            }
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
