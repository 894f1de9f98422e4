fn main() {
    std::process::exit(drkernel_cli::run(std::env::args_os()));
}
