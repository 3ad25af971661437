use std::process::ExitCode;

fn main() -> ExitCode {
    hoi_cli::run_from(std::env::args_os())
}
