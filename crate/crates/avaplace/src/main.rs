fn main() -> std::process::ExitCode {
    avaplace::cli::main()
}
