fn main() {
    std::process::exit(lagasy::cli::run());
}
