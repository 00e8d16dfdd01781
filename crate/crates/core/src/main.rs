fn main() {
    std::process::exit(payne_quad::cli::run(std::env::args_os()));
}
