fn main() {
    std::process::exit(lipbox::cli::main_with_args(std::env::args_os()));
}
