fn main() {
    std::process::exit(su11_phase_lab::cli::run(std::env::args_os()));
}
