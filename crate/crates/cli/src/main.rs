fn main() {
    std::process::exit(ringrep_cli::main_with_env());
}
