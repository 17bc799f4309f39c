fn main() -> std::process::ExitCode {
    lane_emden::cli::main()
}
