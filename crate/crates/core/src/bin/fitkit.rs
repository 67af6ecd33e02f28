fn main() {
    std::process::exit(fitkit::cli::run(std::env::args_os()));
}
