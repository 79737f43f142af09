fn main() {
    std::process::exit(renorm_julia::cli::run(std::env::args_os()));
}
