use std::io::Write;
use std::process::ExitCode;

use clap::Parser;
use geoconvex::cli::{execute, Cli};

fn main() -> ExitCode {
    let cli = Cli::parse();
    match execute(&cli) {
        Ok(report) => {
            let mut stdout = std::io::stdout().lock();
            if stdout.write_all(report.to_jsonl().as_bytes()).is_err() {
                return ExitCode::from(1);
            }
            ExitCode::from(report.exit_code() as u8)
        }
        Err(e) => {
            eprintln!("geoconvex: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
