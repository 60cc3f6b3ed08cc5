fn main() {
    std::process::exit(cde::cli::run_cli());
}
