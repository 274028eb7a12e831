fn main() -> std::process::ExitCode {
    arfex::cli::main()
}
