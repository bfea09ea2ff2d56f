fn main() {
    std::process::exit(tsfrac_cli::run());
}
