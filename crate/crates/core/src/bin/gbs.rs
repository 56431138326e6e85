fn main() {
    std::process::exit(gbs_core::cli::main_with_args(std::env::args_os()));
}
