use clap::Parser;

fn main() {
    let cfg = magicstate::cli::RunConfig::parse();
    std::process::exit(magicstate::cli::run(cfg));
}
