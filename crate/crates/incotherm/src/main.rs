fn main() -> std::process::ExitCode {
    incotherm::cli::main_with_args(std::env::args_os())
}
