fn main() { std::process::exit(boundary_growth::cli::run(std::env::args_os())); }
