mod config;
mod error;
mod output;
mod run;
mod validate;

use std::io::{self, Write};
use std::process::ExitCode;

use clap::error::ErrorKind;
use clap::Parser;

use config::{Cli, RunConfig};
use error::CliError;

/// Exit status for a usage error; `validate` failures exit with 2.
const EXIT_USAGE: u8 = 1;

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => ExitCode::SUCCESS,
                _ => ExitCode::from(EXIT_USAGE),
            };
        }
    };
    let stdout = io::stdout();
    let mut out = stdout.lock();
    let status = RunConfig::from_cli(cli).and_then(|config| run::run(&config, &mut out));
    let _ = out.flush();
    match status {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            match &e {
                CliError::Usage(_) => eprintln!("error: {e}\n\nFor more information, try '--help'."),
                _ => eprintln!("error: {e}"),
            }
            ExitCode::from(EXIT_USAGE)
        }
    }
}
