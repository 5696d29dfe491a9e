fn main() {
    std::process::exit(mixjitter_cli::main_with_args(std::env::args_os()));
}
