fn main() {
    std::process::exit(qmdp::cli::run_from_env());
}
