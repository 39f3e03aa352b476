use std::process::ExitCode;

fn main() -> ExitCode {
    walkbound::cli::main_with(std::env::args_os())
}
