fn main() {
    std::process::exit(projektor::cli::main_with(std::env::args_os()));
}
