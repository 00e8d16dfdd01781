//! Drives the command line in-process: `cargo run --example run_cli -- quad --field 3^2 --payne`.

fn main() {
    let mut args: Vec<String> = std::env::args().collect();
    if args.len() == 1 {
        args.extend(["quad", "--field", "3^2", "--payne"].map(String::from));
    }
    std::process::exit(payne_quad::cli::run(args));
}
