fn main() {
    std::process::exit(lpgen::cli::run_cli(std::env::args_os()));
}
