fn main() {
    let code = revmeas::cli::run_cli(std::env::args_os(), &mut std::io::stderr());
    std::process::exit(code);
}
