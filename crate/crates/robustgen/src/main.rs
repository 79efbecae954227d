fn main() {
    std::process::exit(robustgen::cli::main_with_args(std::env::args_os()));
}
