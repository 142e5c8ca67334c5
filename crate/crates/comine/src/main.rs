use clap::Parser;

fn main() {
    std::process::exit(comine::cli::run(comine::cli::Cli::parse()));
}
