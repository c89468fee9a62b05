fn main() {
    std::process::exit(olfactory::cli::run(std::env::args_os()));
}
