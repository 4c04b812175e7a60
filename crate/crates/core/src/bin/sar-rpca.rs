fn main() {
    std::process::exit(sar_rpca::cli::main_with_exit_code());
}
