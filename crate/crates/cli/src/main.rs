use clap::Parser;
use cnt_casimir_cli::{run, Cli};

fn main() {
    let cli = Cli::parse();
    let default = if cli.debug_checks { "debug" } else { "info" };
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or(default)).init();
    if let Err(e) = run(&cli) {
        eprintln!("error: {e}");
        std::process::exit(e.exit_code());
    }
}
