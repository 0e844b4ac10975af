fn main() {
    std::process::exit(steerkit::cli::run(std::env::args_os()));
}
