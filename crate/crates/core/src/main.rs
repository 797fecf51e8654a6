fn main() {
    std::process::exit(drwave::cli::run(std::env::args_os()));
}
