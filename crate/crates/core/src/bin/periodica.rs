fn main() {
    std::process::exit(periodica::cli::main());
}
