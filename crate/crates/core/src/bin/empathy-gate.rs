fn main() {
    std::process::exit(empathy_gate::cli::run(std::env::args_os()));
}
