fn main() {
    let args: Vec<String> = std::env::args().collect();
    let code = saito_forge::cli::run(&args[1..]);
    std::process::exit(code);
}
