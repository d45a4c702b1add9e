fn main() {
    std::process::exit(valdist::cli::main_with_args(std::env::args_os()));
}
