fn main() {
    std::process::exit(walsh_greedy::cli::run(std::env::args_os()));
}
