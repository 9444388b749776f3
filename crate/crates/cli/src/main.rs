fn main() {
    std::process::exit(ratcheck_cli::run(std::env::args_os()));
}
