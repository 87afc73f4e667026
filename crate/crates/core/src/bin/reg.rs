fn main() {
    std::process::exit(evreg::cli::run(std::env::args_os()));
}
