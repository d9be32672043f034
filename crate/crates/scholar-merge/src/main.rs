fn main() {
    std::process::exit(scholar_merge::cli::run());
}
