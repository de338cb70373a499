use clap::Parser;
use kahlerdyn::cli::{run, Args};

fn main() {
    std::process::exit(run(&Args::parse()));
}
