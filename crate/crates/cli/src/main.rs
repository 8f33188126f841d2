fn main() {
    std::process::exit(dipesim_cli::run_from_args(std::env::args_os()));
}
