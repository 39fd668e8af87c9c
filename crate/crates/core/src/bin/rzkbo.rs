use std::process::ExitCode;

fn main() -> ExitCode {
    rzkbo::par::configure_threads_from_env();
    ExitCode::from(rzkbo::cli::main_with_args(std::env::args_os()) as u8)
}
