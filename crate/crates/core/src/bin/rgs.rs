fn main() {
    std::process::exit(reversible_gs::harness::cli_main(std::env::args_os()));
}
