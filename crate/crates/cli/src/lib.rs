//! Library half of the `qknn-lab` binary: argument types, command
//! implementations, and report schemas, kept importable for tests.

pub mod args;
pub mod commands;
pub mod report;

use thiserror::Error;

/// CLI-level failures, classified by exit code: 2 usage, 3 data, 4 internal.
#[derive(Debug, Error)]
pub enum CliError {
    #[error("usage: {0}")]
    Usage(String),
    #[error("data: {0}")]
    Data(String),
    #[error("internal: {0}")]
    Internal(String),
}

impl CliError {
    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Usage(_) => 2,
            CliError::Data(_) => 3,
            CliError::Internal(_) => 4,
        }
    }
}

pub fn run(cli: args::Cli) -> Result<(), CliError> {
    match &cli.command {
        args::Command::SwapTest(args) => commands::cmd_swap_test(args),
        args::Command::Grover(args) => commands::cmd_grover(args),
        args::Command::Knn(args) => commands::cmd_knn(args),
        args::Command::Qknn(args) => commands::cmd_qknn(args),
        args::Command::Compare(args) => commands::cmd_compare(args),
    }
}
