use std::process::ExitCode;

fn main() -> ExitCode {
    tsort_core::cli::main()
}
