fn main() {
    std::process::exit(biharmonic_core::cli::main_entry());
}
