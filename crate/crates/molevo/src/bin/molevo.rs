use clap::Parser;

fn main() {
    let cli = molevo::cli::Cli::parse();
    std::process::exit(molevo::cli::execute(cli));
}
