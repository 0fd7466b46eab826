fn main() {
    let argv: Vec<String> = std::env::args().collect();
    std::process::exit(wishart_stc_cli::run(&argv));
}
