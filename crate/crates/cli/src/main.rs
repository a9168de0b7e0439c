fn main() {
    std::process::exit(fdeform_cli::run(std::env::args_os().collect()));
}
