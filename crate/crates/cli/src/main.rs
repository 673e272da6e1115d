fn main() {
    std::process::exit(dirichlet_cli::run(std::env::args_os()));
}
