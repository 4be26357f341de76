fn main() {
    std::process::exit(heisrect::cli::main_entry());
}
