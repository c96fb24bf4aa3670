fn main() {
    std::process::exit(cvqubit::cli::run());
}
