fn main() {
    std::process::exit(jscs::cli::run());
}
