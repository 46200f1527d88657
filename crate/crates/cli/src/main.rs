fn main() {
    std::process::exit(pqn_cli::main_with_args(std::env::args_os()));
}
