use std::process::ExitCode;

use clap::Parser;

fn main() -> ExitCode {
    let cli = qknn_lab::args::Cli::parse();
    match qknn_lab::run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(err) => {
            eprintln!("error: {err}");
            ExitCode::from(err.exit_code())
        }
    }
}
