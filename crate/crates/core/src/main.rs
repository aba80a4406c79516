fn main() {
    std::process::exit(qform_codes::cli::main());
}
