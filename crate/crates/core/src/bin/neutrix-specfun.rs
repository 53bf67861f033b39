fn main() {
    std::process::exit(neutrix_specfun::cli::run(std::env::args_os()));
}
