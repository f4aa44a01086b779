fn main() {
    std::process::exit(curricle::cli::run());
}
