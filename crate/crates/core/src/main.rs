fn main() {
    std::process::exit(confpersist::cli::run(std::env::args_os()));
}
