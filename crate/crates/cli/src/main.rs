use std::io::Write;
use std::process::ExitCode;

use bn_cli::{commands, Cli, CliError};
use clap::Parser;

fn emit(cli: &Cli, text: &str) -> Result<(), CliError> {
    match &cli.output {
        Some(path) => std::fs::write(path, text).map_err(|e| CliError::Io { path: path.display().to_string(), source: e }),
        None => std::io::stdout()
            .lock()
            .write_all(text.as_bytes())
            .map_err(|e| CliError::Io { path: "<stdout>".into(), source: e }),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let outcome = commands::run(&cli).and_then(|text| emit(&cli, &text));
    match outcome {
        Ok(()) => ExitCode::SUCCESS,
        Err(err) => {
            if let CliError::Reported { output, .. } = &err {
                // The document is still useful (it says why the fit stopped); emit it before failing.
                let _ = emit(&cli, output);
            }
            eprintln!("error: {err}");
            ExitCode::from(err.exit_code() as u8)
        }
    }
}
