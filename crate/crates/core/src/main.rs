use std::process::ExitCode;

fn main() -> ExitCode {
    katsuyou::cli::main_with_args(std::env::args_os())
}
