fn main() {
    std::process::exit(eonsim::cli::main_from_env());
}
