fn main() {
    std::process::exit(lyrimeter::cli::main());
}
