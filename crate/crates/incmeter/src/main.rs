use clap::Parser;

fn main() {
    let cli = incmeter::cli::Cli::parse();
    std::process::exit(incmeter::cli::run(cli));
}
