fn main() {
    std::process::exit(qzeros::cli::main_with_args(std::env::args_os()));
}
