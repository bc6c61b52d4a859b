fn main() {
    std::process::exit(treelip::cli::main_with_args(std::env::args_os()));
}
