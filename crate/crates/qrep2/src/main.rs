fn main() {
    std::process::exit(qrep2::cli::main_with(std::env::args_os()));
}
