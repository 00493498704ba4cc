use clap::Parser;
use qcover::cli_io::{run, Cli};

fn main() {
    std::process::exit(run(Cli::parse()));
}
