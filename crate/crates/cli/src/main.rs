use clap::Parser;

fn main() {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("info")).init();
    let cli = crossover::Cli::parse();
    if let Err(err) = crossover::run(&cli) {
        eprintln!("error[{}]: {err}", err.code());
        std::process::exit(err.exit_code());
    }
}
