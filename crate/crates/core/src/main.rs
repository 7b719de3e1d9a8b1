fn main() {
    std::process::exit(quadperm::cli::run(std::env::args_os()));
}
