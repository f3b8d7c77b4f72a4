use std::io::Write;
use std::process::ExitCode;

use clap::Parser;

use classeval::cli::{run, Cli};

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(doc) => {
            let mut out = std::io::stdout().lock();
            if out.write_all(doc.as_bytes()).and_then(|_| out.flush()).is_err() {
                return ExitCode::from(1);
            }
            ExitCode::SUCCESS
        }
        Err(e) => {
            eprintln!("classeval: {}", e.message);
            ExitCode::from(e.code as u8)
        }
    }
}
