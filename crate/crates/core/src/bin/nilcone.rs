fn main() {
    std::process::exit(nilcone::cli::run(std::env::args_os()));
}
