use clap::Parser;

fn main() {
    let cli = qpca::cli::Cli::parse();
    std::process::exit(qpca::cli::run(cli));
}
