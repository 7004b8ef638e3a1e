fn main() {
    std::process::exit(scorerate::cli::main_with(std::env::args_os()));
}
