fn main() {
    std::process::exit(mocz::cli::main_with(std::env::args_os()));
}
