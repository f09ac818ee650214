fn main() {
    std::process::exit(fqcount::cli::main_with_args(std::env::args_os()));
}
