fn main() {
    std::process::exit(meshlift::cli::run(std::env::args_os()));
}
