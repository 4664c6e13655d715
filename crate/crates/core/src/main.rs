fn main() {
    std::process::exit(gaussduet::cli::run());
}
