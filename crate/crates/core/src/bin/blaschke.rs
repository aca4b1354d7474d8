fn main() {
    std::process::exit(blaschke_monodromy::cli::run(std::env::args()));
}
