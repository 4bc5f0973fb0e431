fn main() -> std::process::ExitCode {
    fieldrecon::cli::main()
}
