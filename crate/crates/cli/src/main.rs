//! The `zfqft` command-line entry point.

use std::process::ExitCode;

use clap::error::ErrorKind;
use clap::Parser;
use zfqft_cli::{run, Cli, EXIT_CONFIG, EXIT_FAIL, EXIT_PASS};

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            let code = match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => EXIT_PASS,
                _ => EXIT_CONFIG,
            };
            return ExitCode::from(code as u8);
        }
    };
    let level = if cli.global.quiet { "error" } else { "warn" };
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or(level)).init();
    match run(&cli) {
        Ok(bundle) => {
            if !cli.global.quiet {
                print!("{}", bundle.render_table());
            }
            ExitCode::from(if bundle.pass { EXIT_PASS } else { EXIT_FAIL } as u8)
        }
        Err(e) => {
            eprintln!("zfqft: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
