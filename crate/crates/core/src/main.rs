fn main() {
    std::process::exit(meyer_ap::cli::main_with_args(std::env::args().collect()));
}
