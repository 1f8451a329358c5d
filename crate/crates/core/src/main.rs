use std::process::ExitCode;

fn main() -> ExitCode {
    ExitCode::from(geomrand::cli::main(std::env::args_os()))
}
