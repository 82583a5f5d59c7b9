fn main() {
    std::process::exit(scs_core::cli::run(std::env::args()));
}
