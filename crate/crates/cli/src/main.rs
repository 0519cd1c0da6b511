mod args;
mod commands;
mod output;

use std::process::ExitCode;

use clap::Parser;

use args::{Cli, Command};
use commands::{Failure, EXIT_USAGE, EXIT_VERIFICATION};

fn run(cli: &Cli) -> Result<commands::Outcome, Failure> {
    if let Some(t) = cli.threads {
        if t == 0 {
            return Err(Failure::usage("--threads must be at least 1"));
        }
        rayon::ThreadPoolBuilder::new()
            .num_threads(t)
            .build_global()
            .map_err(anyhow::Error::from)?;
    }
    match &cli.command {
        Command::Construct(a) => commands::construct(a, cli.format),
        Command::Verify(a) => commands::verify_cmd(a, cli.format),
        Command::Scan(a) => commands::scan(a, cli.format),
        Command::Energy(a) => commands::energy(a, cli.format),
        Command::ExportField(a) => commands::export_field(a, cli.format),
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match run(&cli) {
        Ok(outcome) => {
            if let Err(e) = output::emit(cli.output.as_deref(), &outcome.text) {
                eprintln!("error: {e:#}");
                return ExitCode::from(EXIT_USAGE);
            }
            if outcome.passed {
                ExitCode::SUCCESS
            } else {
                eprintln!("verification failed");
                ExitCode::from(EXIT_VERIFICATION)
            }
        }
        Err(f) => {
            eprintln!("error: {:#}", f.error);
            ExitCode::from(f.code)
        }
    }
}
