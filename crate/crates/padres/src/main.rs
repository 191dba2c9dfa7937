fn main() {
    std::process::exit(padres::cli::run());
}
