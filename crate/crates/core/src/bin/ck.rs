fn main() {
    std::process::exit(congruence_kernel::cli::run(std::env::args_os()));
}
