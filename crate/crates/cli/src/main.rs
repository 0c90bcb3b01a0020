mod args;
mod commands;
mod io;

use std::process::ExitCode;

use clap::Parser;

use crate::args::{Cli, Command};
use crate::io::{CliError, CliResult};

fn run(cli: Cli) -> CliResult<bool> {
    let config = serde_json::to_value(&cli.command)?;
    match &cli.command {
        // Every generator failure is a bad parameter.
        Command::Generate(a) => commands::generate(a, &config).map_err(|e| CliError { code: 2, ..e })?,
        Command::Distance(a) => commands::distance(a, &config)?,
        Command::Decompose(a) => commands::decompose(a, &config)?,
        Command::Audit(a) => commands::audit(a, &config)?,
        Command::Density(a) => commands::density(a, &config)?,
        Command::Tiles(a) => commands::tiles(a, &config)?,
        Command::Verify(a) => return commands::verify(a, &config),
    }
    Ok(true)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    if let Some(threads) = std::env::var("ERGOBLOCK_THREADS").ok().and_then(|t| t.parse().ok()) {
        // Only fails if a pool already exists, which cannot happen this early.
        let _ = rayon::ThreadPoolBuilder::new().num_threads(threads).build_global();
    }
    match run(cli) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.code)
        }
    }
}
