fn main() {
    std::process::exit(tabstruct::run_from(std::env::args_os()));
}
