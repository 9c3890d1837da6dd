fn main() -> std::process::ExitCode {
    stabgeom::harness::cli::main()
}
