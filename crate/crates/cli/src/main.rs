use std::process::ExitCode;

fn main() -> ExitCode {
    ExitCode::from(slopehop_cli::run(std::env::args_os()) as u8)
}
