fn main() {
    std::process::exit(treespace::cli::main());
}
