fn main() {
    std::process::exit(pstnet::cli::main_with_args(std::env::args_os()));
}
