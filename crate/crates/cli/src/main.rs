use std::io::Write;
use std::process::ExitCode;

use clap::Parser;
use prepsim_cli::{run_command, Cli, CliError, RunConfig};

fn main() -> ExitCode {
    let cfg = RunConfig::from(Cli::parse());
    match execute(&cfg) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(err) => {
            let report = serde_json::to_string_pretty(&err.to_json()).expect("error serializes");
            eprintln!("{report}");
            ExitCode::from(2)
        }
    }
}

fn execute(cfg: &RunConfig) -> Result<bool, CliError> {
    let report = run_command(cfg)?;
    let text = report.render(cfg.output_format);
    match &cfg.out {
        Some(path) => std::fs::write(path, text).map_err(|source| CliError::Write {
            path: path.clone(),
            source,
        })?,
        None => {
            let mut stdout = std::io::stdout().lock();
            stdout
                .write_all(text.as_bytes())
                .and_then(|_| stdout.flush())
                .map_err(|source| CliError::Write {
                    path: "<stdout>".into(),
                    source,
                })?;
        }
    }
    Ok(report.passed)
}
