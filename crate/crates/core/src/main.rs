fn main() {
    std::process::exit(compound_align::cli::main_with_args(std::env::args_os()));
}
