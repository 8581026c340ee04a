use std::io::Write;
use std::process::ExitCode;

use clap::Parser;
use gamow_cli::{run, Cli, Command};

fn main() -> ExitCode {
    let cli = Cli::parse();
    let to_stdout = match &cli.command {
        Command::Decay(c) | Command::Moments(c) | Command::Audit(c) => c.out.is_none(),
        Command::Pair { common, .. } => common.out.is_none(),
    };
    match run(&cli.command) {
        Ok(outcome) => {
            if to_stdout {
                let mut stdout = std::io::stdout().lock();
                if stdout.write_all(outcome.output.as_bytes()).is_err() {
                    return ExitCode::from(2);
                }
            }
            eprintln!("{}", outcome.summary);
            ExitCode::from(outcome.exit_code())
        }
        Err(e) => {
            eprintln!("gamow: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
