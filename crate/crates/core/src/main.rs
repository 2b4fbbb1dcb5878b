use std::process::ExitCode;

use clap::Parser;
use mixed_numerology::cli::{run, Cli};

fn main() -> ExitCode {
    ExitCode::from(run(Cli::parse()))
}
