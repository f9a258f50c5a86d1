use std::process::ExitCode;

use clap::Parser;
use iontrap_cli::{run, Cli, CliError};
use iontrap::Error;

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(text) => {
            print!("{text}");
            ExitCode::SUCCESS
        }
        Err(e) => {
            match &e {
                CliError::Model(Error::GrowthOverflow { tau, .. }) => {
                    eprintln!("error: {e}");
                    eprintln!("integration stopped at tau = {tau}");
                }
                _ => eprintln!("error: {e}"),
            }
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
