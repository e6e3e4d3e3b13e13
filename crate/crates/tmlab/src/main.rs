use clap::Parser;

fn main() {
    let cli = tmlab::Cli::parse();
    std::process::exit(tmlab::run(&cli));
}
