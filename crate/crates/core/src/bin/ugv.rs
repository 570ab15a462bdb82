fn main() {
    std::process::exit(ugv::cli::main_from_env());
}
