fn main() {
    std::process::exit(lambda_variance::io::cli::main_with_env());
}
