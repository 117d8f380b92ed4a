fn main() {
    std::process::exit(otlex::cli::main());
}
