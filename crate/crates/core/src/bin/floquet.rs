fn main() {
    std::process::exit(bichromatic_floquet::cli::run(std::env::args_os()));
}
