fn main() {
    std::process::exit(signscan::cli::run(std::env::args_os().collect()));
}
