fn main() {
    std::process::exit(qlts::cli::run(std::env::args().skip(1)));
}
