fn main() {
    std::process::exit(quasisum::cli::run(std::env::args_os()));
}
