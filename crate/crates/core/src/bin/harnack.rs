fn main() {
    std::process::exit(harnack::cli::run(std::env::args_os()));
}
