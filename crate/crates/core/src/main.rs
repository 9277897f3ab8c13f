fn main() {
    std::process::exit(hom_fingerprint::cli::main_with_args(std::env::args_os()));
}
