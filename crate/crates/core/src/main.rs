fn main() {
    std::process::exit(entangle::cli::run(std::env::args_os()));
}
