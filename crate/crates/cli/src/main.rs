fn main() {
    std::process::exit(holosup_cli::run(std::env::args_os()));
}
