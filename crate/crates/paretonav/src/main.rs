fn main() -> std::process::ExitCode {
    paretonav::cli::main()
}
