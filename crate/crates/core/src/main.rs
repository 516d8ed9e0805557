fn main() {
    let code = efron_dual::cli::run(std::env::args_os(), &mut std::io::stdout().lock());
    std::process::exit(code);
}
