fn main() {
    std::process::exit(cxshadow::cli::run(std::env::args_os()));
}
