use std::process::ExitCode;

fn main() -> ExitCode {
    strata_cli::main_with(std::env::args_os().collect())
}
