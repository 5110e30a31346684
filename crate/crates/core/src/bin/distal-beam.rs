use clap::Parser;
use distal_beam::cli::{run, Cli};

fn main() {
    std::process::exit(run(Cli::parse()));
}
