fn main() {
    std::process::exit(jjphotond::cli::run(std::env::args_os()));
}
