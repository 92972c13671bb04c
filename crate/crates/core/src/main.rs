fn main() {
    std::process::exit(waterbed::cli::main_with_args(std::env::args_os()));
}
