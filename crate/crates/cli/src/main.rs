fn main() {
    let result = besselkit_cli::run(std::env::args_os());
    if let Err(e) = &result {
        eprintln!("besselkit: {e}");
    }
    std::process::exit(besselkit_cli::exit_code(&result));
}
