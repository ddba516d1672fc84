fn main() {
    std::process::exit(heislab_cli::main_with_args(std::env::args_os()));
}
