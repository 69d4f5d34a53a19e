fn main() { std::process::exit(hypertess::cli::run(std::env::args().collect())); }
