use clap::Parser;

fn main() {
    let cli = gapspec::cli::Cli::parse();
    std::process::exit(gapspec::cli::main_with(&cli));
}
