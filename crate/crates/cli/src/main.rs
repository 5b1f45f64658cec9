use std::process::ExitCode;

fn main() -> ExitCode {
    irmsep_cli::main_with_args(std::env::args_os())
}
