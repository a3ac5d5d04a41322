fn main() {
    std::process::exit(cavent::cli::main_exit_code());
}
