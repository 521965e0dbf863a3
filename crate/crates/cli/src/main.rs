use std::io::Write;
use std::process::ExitCode;

use clap::Parser;

use dilemma_cli::commands::run;
use dilemma_cli::{CliError, RunConfig};

fn init_logging() {
    env_logger::Builder::from_env(env_logger::Env::new().filter_or("DILEMMA_LOG", "error"))
        .target(env_logger::Target::Stderr)
        .init();
}

fn write_out(cfg: &RunConfig, data: &str) -> Result<(), CliError> {
    match &cfg.output {
        Some(path) => std::fs::write(path, data)?,
        None => {
            let mut stdout = std::io::stdout().lock();
            stdout.write_all(data.as_bytes())?;
            stdout.flush()?;
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    init_logging();
    let cfg = RunConfig::parse();
    log::debug!("{cfg:?}");
    match run(&cfg).and_then(|data| write_out(&cfg, &data)) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
