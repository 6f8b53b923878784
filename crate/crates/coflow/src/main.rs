fn main() {
    std::process::exit(coflow::cli::run(std::env::args_os()));
}
