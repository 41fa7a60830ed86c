fn main() {
    std::process::exit(kitaev_otto::cli::run());
}
