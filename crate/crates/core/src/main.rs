use std::io::{Read, Write};
use std::process::ExitCode;

use clap::Parser;
use semifree::cli::{run, RunConfig, EXIT_MALFORMED};

fn read_input(config: &RunConfig) -> std::io::Result<Vec<u8>> {
    let mut buf = Vec::new();
    if !config.command.reads_input() {
        return Ok(buf);
    }
    match config.command.input_path() {
        Some(p) if p.as_os_str() != "-" => buf = std::fs::read(p)?,
        _ => {
            std::io::stdin().read_to_end(&mut buf)?;
        }
    }
    Ok(buf)
}

fn main() -> ExitCode {
    let config = RunConfig::parse();
    let input = match read_input(&config) {
        Ok(b) => b,
        Err(e) => {
            eprintln!("error: {e}");
            return ExitCode::from(EXIT_MALFORMED as u8);
        }
    };
    let outcome = run(&config, &input);
    let mut out = std::io::stdout().lock();
    let _ = out.write_all(outcome.report.as_bytes());
    ExitCode::from(outcome.code as u8)
}
