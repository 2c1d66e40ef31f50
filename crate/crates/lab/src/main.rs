fn main() {
    std::process::exit(semimarkov_lab::cli::run(std::env::args_os()));
}
