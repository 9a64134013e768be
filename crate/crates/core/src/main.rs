fn main() {
    std::process::exit(toda_spectra::cli::run(std::env::args_os()));
}
