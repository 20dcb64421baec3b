fn main() {
    std::process::exit(hedonet_cli::main_with_args(std::env::args_os()));
}
