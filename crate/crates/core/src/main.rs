fn main() {
    std::process::exit(cldsim::cli::run(std::env::args_os()));
}
