use clap::Parser;

use reident_cli::Cli;

fn main() {
    let cli = Cli::parse();
    if let Err(error) = reident_cli::run(cli) {
        eprintln!("error: {error}");
        std::process::exit(error.exit_code());
    }
}
