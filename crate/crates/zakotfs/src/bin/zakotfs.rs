fn main() {
    std::process::exit(zakotfs::cli::run(std::env::args_os()));
}
