fn main() {
    std::process::exit(nel_cli::run(std::env::args_os()));
}
