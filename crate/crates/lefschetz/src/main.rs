use clap::Parser;

fn main() {
    let cli = lefschetz::cli::Cli::parse();
    std::process::exit(lefschetz::cli::run(cli));
}
