fn main() {
    std::process::exit(riccati_pade::cli::main_with_args(std::env::args_os()));
}
