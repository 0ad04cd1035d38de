fn main() {
    std::process::exit(coordinate_play::cli::run(std::env::args_os()));
}
