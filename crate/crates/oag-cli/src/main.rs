use clap::Parser;

fn main() {
    let cli = oag_cli::Cli::parse();
    if let Err(err) = oag_cli::run(&cli) {
        eprintln!("error: {}", err.message());
        std::process::exit(err.exit_code());
    }
}
