use std::process::ExitCode;

use clap::Parser;
use gradkit_cli::args::Cli;

/// Size the global thread pool from `GRADKIT_THREADS`, if set.
fn configure_threads() -> Result<(), String> {
    let Ok(value) = std::env::var("GRADKIT_THREADS") else {
        return Ok(());
    };
    let threads: usize = value
        .parse()
        .ok()
        .filter(|&n| n > 0)
        .ok_or_else(|| format!("GRADKIT_THREADS must be a positive integer, got '{value}'"))?;
    rayon::ThreadPoolBuilder::new()
        .num_threads(threads)
        .build_global()
        .map_err(|e| e.to_string())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    if let Err(message) = configure_threads() {
        eprintln!("error: {message}");
        return ExitCode::from(2);
    }
    match gradkit_cli::run(cli.command) {
        Ok(()) => ExitCode::SUCCESS,
        Err(err) => {
            eprintln!("error: {err}");
            ExitCode::from(gradkit_cli::exit_code(&err) as u8)
        }
    }
}
