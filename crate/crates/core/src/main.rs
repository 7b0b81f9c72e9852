fn main() {
    std::process::exit(valring::cli::run(std::env::args_os()));
}
