fn main() {
    std::process::exit(pantograph_cli::run(std::env::args_os()));
}
