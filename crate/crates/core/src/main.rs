fn main() {
    std::process::exit(wiener_core::harness::run_cli(std::env::args_os()));
}
