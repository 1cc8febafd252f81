fn main() {
    std::process::exit(rootcert::cli::main_with_args(std::env::args_os()));
}
