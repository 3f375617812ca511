fn main() {
    std::process::exit(nilgeo::cli::run(std::env::args_os()));
}
