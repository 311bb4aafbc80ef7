use std::process::ExitCode;

fn main() -> ExitCode {
    egframe::cli::main_entry()
}
