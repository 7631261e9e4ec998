fn main() {
    std::process::exit(monoindex::cli::run(std::env::args_os()));
}
