use std::process::ExitCode;

fn main() -> ExitCode {
    phasecov::cli::run(std::env::args_os())
}
