use std::process::ExitCode;

fn main() -> ExitCode {
    riesz_frames::cli::main_with_args(std::env::args_os())
}
