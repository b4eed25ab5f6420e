fn main() {
    std::process::exit(rppg_cli::main_with_args(std::env::args_os()));
}
