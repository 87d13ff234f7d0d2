fn main() {
    std::process::exit(qkdlab::cli::main());
}
