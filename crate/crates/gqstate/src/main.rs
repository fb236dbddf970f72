use std::process::ExitCode;

fn main() -> ExitCode {
    gqstate::cli::run_from_env()
}
