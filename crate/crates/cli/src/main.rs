mod args;
mod commands;
mod report;

use std::fs;
use std::process::ExitCode;

use clap::Parser;
use serde_json::json;

use args::{Cli, Command};
use commands::{Failure, Outcome};

fn run(cli: &Cli) -> Result<Outcome, Failure> {
    let cfg = cli.global.config();
    match &cli.command {
        Command::Build(b) => commands::build(b),
        Command::Verify(v) => commands::verify(v, &cfg),
        Command::Deform(d) => commands::deform(d, &cfg),
        Command::Sigma(s) => commands::sigma(s),
        Command::Solve(s) => commands::solve(s, &cfg),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(outcome) => {
            let text = serde_json::to_string_pretty(&outcome.document).expect("serializable");
            match &cli.global.out {
                Some(path) => {
                    if let Err(e) = fs::write(path, text + "\n") {
                        eprintln!("{}", json!({ "error": format!("{}: {e}", path.display()) }));
                        return ExitCode::from(2);
                    }
                }
                None => println!("{text}"),
            }
            ExitCode::from(outcome.code as u8)
        }
        Err(f) => {
            eprintln!("{}", json!({ "error": f.message(), "exit_code": f.code() }));
            ExitCode::from(f.code() as u8)
        }
    }
}
