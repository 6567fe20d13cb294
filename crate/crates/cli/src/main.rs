fn main() {
    std::process::exit(phlab::run(std::env::args_os()));
}
