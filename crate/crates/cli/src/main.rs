use clap::Parser;

use ergodic_cli::{configure_threads, error_json, exit_code, run, Cli};

fn main() {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) if !e.use_stderr() => e.exit(),
        Err(e) => {
            let msg = e.to_string();
            let first = msg.lines().next().unwrap_or("invalid arguments");
            eprintln!("{}", serde_json::json!({ "error": "usage", "message": first, "exit_code": 2 }));
            std::process::exit(2);
        }
    };
    if let Err(e) = configure_threads(cli.threads).and_then(|()| run(&cli)) {
        eprintln!("{}", error_json(&e));
        std::process::exit(exit_code(&e));
    }
}
