fn main() {
    std::process::exit(monorep::cli::run(std::env::args_os()));
}
