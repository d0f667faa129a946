fn main() {
    std::process::exit(bibo_funnel::cli::run(std::env::args_os()));
}
