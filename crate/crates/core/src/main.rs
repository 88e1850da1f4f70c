fn main() {
    std::process::exit(qeuler::cli::run(std::env::args_os()));
}
