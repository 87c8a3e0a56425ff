fn main() {
    std::process::exit(ionduct::cli::run_from_env());
}
