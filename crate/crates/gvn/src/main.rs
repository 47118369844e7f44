use clap::Parser;
use gvn::cli::{self, Cli};

fn main() {
    let cli = Cli::parse();
    match cli::execute(cli) {
        Ok((output, code)) => {
            print!("{output}");
            std::process::exit(code);
        }
        Err(error) => {
            eprintln!("error: {error}");
            std::process::exit(2);
        }
    }
}
