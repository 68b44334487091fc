fn main() {
    std::process::exit(ncd_cli::run_from_args(std::env::args_os()));
}
