//! Batch driver for the `entgap` experiments.

pub mod commands;
pub mod config;
pub mod error;
pub mod measure_file;
pub mod output;

use clap::Parser;

pub use commands::{run, Outcome};
pub use config::{Cli, CommandKind, ExperimentConfig};
pub use error::{CliError, Result};

/// Parses `args`, runs the command and writes its table. Returns the
/// process exit code: 0 ok, 2 config, 3 I/O, 4 property violation.
pub fn main_with<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = e.exit_code();
            let _ = e.print();
            return code;
        }
    };
    match execute(cli) {
        Ok(None) => 0,
        Ok(Some(violation)) => {
            eprintln!("entgap: property violation: {violation}");
            4
        }
        Err(e) => {
            eprintln!("entgap: {e}");
            e.exit_code()
        }
    }
}

fn execute(cli: Cli) -> Result<Option<String>> {
    let config = ExperimentConfig::resolve(cli.command, cli.flags)?;
    let outcome = run(&config)?;
    // written even on a violation, so the witness row can be inspected
    let bytes = output::render(&outcome.table, config.format)?;
    output::write_to(&bytes, config.out.as_deref())?;
    Ok(outcome.violation)
}
