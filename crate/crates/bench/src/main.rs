fn main() {
    std::process::exit(bezier_bbar_bench::run(std::env::args_os()));
}
