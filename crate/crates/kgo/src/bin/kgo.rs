use clap::Parser;

fn main() {
    let cli = kgo::cli::Cli::parse();
    std::process::exit(kgo::cli::run(cli));
}
