fn main() {
    std::process::exit(mcc_cli::main_with_args(std::env::args_os()));
}
