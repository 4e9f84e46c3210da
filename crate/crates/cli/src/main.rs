use std::io;
use std::process::ExitCode;

use clap::error::ErrorKind;
use clap::Parser;
use cnlsearch_cli::{run, Config, Status};

fn main() -> ExitCode {
    let cfg = match Config::try_parse() {
        Ok(cfg) => cfg,
        Err(e) if matches!(e.kind(), ErrorKind::DisplayHelp | ErrorKind::DisplayVersion) => {
            let _ = e.print();
            return ExitCode::SUCCESS;
        }
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(Status::Failure.code() as u8);
        }
    };

    let stdin = io::stdin();
    let status = run(&cfg, &mut stdin.lock(), &mut io::stdout().lock(), &mut io::stderr().lock())
        .unwrap_or_else(|e| {
            eprintln!("error: {e:#}");
            Status::Failure
        });
    ExitCode::from(status.code() as u8)
}
