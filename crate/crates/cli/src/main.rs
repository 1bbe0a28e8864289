//! fracwill: runs the profile, kernel, constants, expansion and gamma
//! experiments from a flat key=value configuration file.

mod config;
mod run;

use std::process::ExitCode;

fn main() -> ExitCode {
    let args: Vec<String> = std::env::args().collect();
    if args.len() != 2 {
        eprintln!("usage: fracwill <config-path>");
        eprintln!("config keys: subcommand, s, potential, curve, ladder, output, l, n, lambda, cap_lambda");
        return ExitCode::from(2);
    }
    if let Ok(threads) = std::env::var("FRACWILL_THREADS") {
        if let Ok(k) = threads.parse::<usize>() {
            let _ = rayon::ThreadPoolBuilder::new().num_threads(k).build_global();
        } else {
            eprintln!("error kind=config msg=\"FRACWILL_THREADS must be an integer\"");
            return ExitCode::from(2);
        }
    }
    let text = match std::fs::read_to_string(&args[1]) {
        Ok(t) => t,
        Err(e) => {
            eprintln!("error kind=io msg=\"cannot read {}: {e}\"", args[1]);
            return ExitCode::from(2);
        }
    };
    let cfg = match config::parse_config(&text) {
        Ok(c) => c,
        Err(e) => {
            eprintln!("error kind=config msg=\"{e}\"");
            return ExitCode::from(2);
        }
    };
    match run::execute(&cfg) {
        Ok(path) => {
            println!("wrote {path}");
            ExitCode::SUCCESS
        }
        Err(e) => {
            eprintln!("error kind=run msg=\"{e}\"");
            ExitCode::from(1)
        }
    }
}
