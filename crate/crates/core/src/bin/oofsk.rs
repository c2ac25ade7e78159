fn main() {
    std::process::exit(oofsk::cli::run(std::env::args()));
}
