use std::process::ExitCode;

use clap::Parser;
use gss_cli::{run, Cli};

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(code) => ExitCode::from(code),
        Err(err) => {
            eprintln!("gss: {err}");
            ExitCode::from(err.exit_code())
        }
    }
}
