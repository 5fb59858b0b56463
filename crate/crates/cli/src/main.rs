use clap::Parser;
use geoflow_cli::Cli;

fn main() {
    let outcome = geoflow_cli::run(Cli::parse());
    std::process::exit(outcome.code());
}
