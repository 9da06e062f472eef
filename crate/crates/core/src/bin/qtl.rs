use clap::Parser;

fn main() {
    let cli = qtl::cli::Cli::parse();
    std::process::exit(qtl::cli::run(cli));
}
