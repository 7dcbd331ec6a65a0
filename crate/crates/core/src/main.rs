fn main() {
    std::process::exit(attenuwave::cli::run(std::env::args_os()));
}
