fn main() {
    std::process::exit(hyers_ulam_l1::cli::run());
}
