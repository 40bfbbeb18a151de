fn main() {
    std::process::exit(nmlkit::cli::run(std::env::args_os()));
}
