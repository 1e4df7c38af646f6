fn main() {
    std::process::exit(cftlab::cli::main_with_args(std::env::args_os()));
}
