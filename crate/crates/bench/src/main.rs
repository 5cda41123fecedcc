use std::process::ExitCode;

use fliphash_bench::cli;

fn main() -> ExitCode {
    ExitCode::from(cli::run(std::env::args_os()) as u8)
}
