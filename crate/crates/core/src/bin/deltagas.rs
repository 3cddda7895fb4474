use clap::Parser;
use deltagas::cli::{run, RunConfig};

fn main() {
    let config = RunConfig::parse();
    std::process::exit(run(&config).code());
}
