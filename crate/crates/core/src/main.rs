fn main() {
    std::process::exit(autosimp::cli::run(std::env::args_os()));
}
