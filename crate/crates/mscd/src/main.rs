use std::process::ExitCode;

fn main() -> ExitCode {
    mscd::cli::main_with(std::env::args_os())
}
