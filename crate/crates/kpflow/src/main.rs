use std::process::ExitCode;

use clap::error::ErrorKind;
use clap::Parser;
use kpflow::commands::execute;
use kpflow::config::Cli;
use kpflow::report::CliError;
use serde_json::Value;

fn fail(e: &CliError) -> ExitCode {
    eprintln!("{}", serde_json::to_string_pretty(&e.to_json()).expect("errors serialize"));
    ExitCode::from(e.exit as u8)
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) if matches!(e.kind(), ErrorKind::DisplayHelp | ErrorKind::DisplayVersion) => {
            let _ = e.print();
            return ExitCode::SUCCESS;
        }
        Err(e) => return fail(&CliError::new(2, "usage", e.to_string().trim_end().to_string(), Value::Null)),
    };
    let run = match execute(&cli) {
        Ok(run) => run,
        Err(e) => return fail(&e),
    };
    match &run.out {
        Some(path) => {
            if let Err(e) = std::fs::write(path, &run.output) {
                return fail(&CliError::io(&path.display().to_string(), &e));
            }
        }
        None => print!("{}", run.output),
    }
    match &run.failure {
        Some(e) => fail(e),
        None => ExitCode::SUCCESS,
    }
}
