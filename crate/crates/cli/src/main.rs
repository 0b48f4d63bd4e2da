use std::process::ExitCode;

use clap::Parser;
use weil_cli::{emit, run, Args, RunConfig};

fn main() -> ExitCode {
    let args = Args::parse();
    let result = RunConfig::from_args(args).and_then(|config| {
        let outcome = run(config.clone())?;
        emit(&config, &outcome.text)?;
        Ok(outcome.success)
    });
    match result {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => {
            eprintln!("weil: one or more checks failed");
            ExitCode::from(1)
        }
        Err(e) => {
            eprintln!("weil: {e}");
            ExitCode::from(2)
        }
    }
}
