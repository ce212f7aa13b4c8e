//! `saranfk`: evaluate functions, verify identities, list and re-render
//! reports.
//!
//! Exit codes: 0 success, 1 a verification failed, 2 usage, configuration
//! or domain error.

mod args;
mod error;
mod eval;
mod report;
mod run;

use args::{Cli, Command, Format, NamedArgs};
use clap::Parser;
use error::CliError;
use std::io::{Read, Write};
use std::path::Path;
use std::process::ExitCode;

fn emit(text: &str, path: Option<&Path>) -> Result<(), CliError> {
    match path {
        Some(p) => std::fs::write(p, text)?,
        None => std::io::stdout().write_all(text.as_bytes())?,
    }
    Ok(())
}

fn all_pass(outcomes: &[report::Outcome]) -> ExitCode {
    if outcomes.iter().all(|o| o.record.pass) {
        ExitCode::SUCCESS
    } else {
        ExitCode::from(1)
    }
}

fn main_inner(cli: Cli) -> Result<ExitCode, CliError> {
    let settings = run::settings_from_env()?;
    match cli.command {
        Command::Eval(e) => {
            let mut named = NamedArgs::parse(&e.args)?;
            let format: Format = if named.has("format") { named.string_or("format", "human").parse()? } else { Format::Human };
            let out = eval::evaluate(&e.function, &mut named, &settings)?;
            emit(&out.render(format)?, None)?;
            Ok(ExitCode::SUCCESS)
        }
        Command::Verify(v) => {
            let config = run::RunConfig::from_args(&v, settings)?;
            let outcomes = run::run(&config);
            emit(&report::render(&outcomes, config.format)?, config.output_path.as_deref())?;
            Ok(all_pass(&outcomes))
        }
        Command::List(l) => {
            emit(&run::list(l.format)?, None)?;
            Ok(ExitCode::SUCCESS)
        }
        Command::Report(r) => {
            let mut text = String::new();
            if r.input.as_os_str() == "-" {
                std::io::stdin().read_to_string(&mut text)?;
            } else {
                text = std::fs::read_to_string(&r.input)?;
            }
            let outcomes: Vec<_> = report::parse_json_lines(&text)?.into_iter().map(report::Outcome::bare).collect();
            emit(&report::render(&outcomes, r.format)?, r.output.as_deref())?;
            Ok(all_pass(&outcomes))
        }
    }
}

fn main() -> ExitCode {
    match main_inner(Cli::parse()) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
    }
}
