fn main() {
    std::process::exit(topictrace::cli::run(std::env::args_os()));
}
