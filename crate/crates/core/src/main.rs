fn main() {
    std::process::exit(bernstein_cubature::harness::run(std::env::args_os()));
}
