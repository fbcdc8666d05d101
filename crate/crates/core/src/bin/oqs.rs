fn main() {
    std::process::exit(oqs::cli::main_with_args(std::env::args_os()));
}
