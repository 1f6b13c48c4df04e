fn main() {
    std::process::exit(moebius::cli::run(std::env::args_os()));
}
