fn main() {
    std::process::exit(degenfrac::cli::run(std::env::args()));
}
