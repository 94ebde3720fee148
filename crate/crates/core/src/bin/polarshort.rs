fn main() {
    std::process::exit(polarshort::cli::main());
}
