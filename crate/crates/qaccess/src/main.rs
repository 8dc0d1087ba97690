fn main() {
    std::process::exit(qaccess::cli::run(std::env::args_os()));
}
