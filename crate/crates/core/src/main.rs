fn main() -> std::process::ExitCode {
    orlab::cli::main_entry()
}
