mod args;
mod commands;
mod config;
mod error;
mod io;

use clap::{CommandFactory, FromArgMatches};

use crate::args::Cli;
use crate::error::CliResult;

fn main() {
    let code = match run() {
        Ok(()) => 0,
        Err(e) => {
            eprintln!("morphtok: {e}");
            e.exit_code()
        }
    };
    std::process::exit(code);
}

fn run() -> CliResult<()> {
    let args = config::expand(std::env::args_os().collect())?;
    let mut command = Cli::command();
    let names: Vec<String> = command
        .get_subcommands()
        .map(|s| s.get_name().to_owned())
        .collect();
    for name in names {
        command = command.mut_subcommand(name, |s| s.args_override_self(true));
    }
    let parsed = command
        .try_get_matches_from(args)
        .and_then(|m| Cli::from_arg_matches(&m));
    let cli = match parsed {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            std::process::exit(if e.use_stderr() { 1 } else { 0 });
        }
    };
    commands::run(cli)
}
