fn main() {
    std::process::exit(pursuitwidth::cli::main_with_args(std::env::args()));
}
