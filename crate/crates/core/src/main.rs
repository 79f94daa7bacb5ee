fn main() {
    std::process::exit(funho::cli::main_with_args(std::env::args_os()));
}
