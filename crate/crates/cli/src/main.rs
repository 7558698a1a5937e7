fn main() {
    std::process::exit(pointcontact_cli::run::real_main());
}
