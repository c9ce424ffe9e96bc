fn main() {
    std::process::exit(qcong::cli::main_with_env());
}
