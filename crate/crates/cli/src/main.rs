fn main() {
    std::process::exit(entgap_cli::main_with(std::env::args_os()));
}
