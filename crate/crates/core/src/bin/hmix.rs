fn main() {
    std::process::exit(hmix::cli::run(std::env::args_os()));
}
