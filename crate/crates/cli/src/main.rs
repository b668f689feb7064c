use std::process::ExitCode;

use clap::Parser;
use ddvv_lab::{main_with, Cli};

fn main() -> ExitCode {
    ExitCode::from(main_with(Cli::parse()))
}
