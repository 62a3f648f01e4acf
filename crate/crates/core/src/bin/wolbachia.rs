fn main() {
    std::process::exit(wolbachia::cli::main_with_args(std::env::args_os()));
}
