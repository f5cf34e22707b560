mod args;
mod commands;
mod output;

use std::process::ExitCode;

use clap::Parser;

use args::Cli;
use commands::Consistency;

const EXIT_IO: u8 = 1;
const EXIT_PARSE: u8 = 3;
const EXIT_PARAMETER: u8 = 4;
const EXIT_CONSISTENCY: u8 = 5;

fn exit_code(err: &anyhow::Error) -> u8 {
    for cause in err.chain() {
        if cause.is::<Consistency>() {
            return EXIT_CONSISTENCY;
        }
        if let Some(e) = cause.downcast_ref::<coreres::Error>() {
            return match e {
                coreres::Error::Io(_) => EXIT_IO,
                coreres::Error::Parse { .. } | coreres::Error::EmptyGraph => EXIT_PARSE,
                _ => EXIT_PARAMETER,
            };
        }
        if cause.is::<serde_json::Error>() {
            return EXIT_PARSE;
        }
        if cause.is::<std::io::Error>() {
            return EXIT_IO;
        }
    }
    EXIT_IO
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    // Usage errors exit with status 2.
    let cli = Cli::parse();
    if let Some(workers) = cli.workers {
        if workers == 0 {
            eprintln!("error: --workers must be at least 1");
            return ExitCode::from(EXIT_PARAMETER);
        }
        if let Err(e) = rayon::ThreadPoolBuilder::new().num_threads(workers).build_global() {
            eprintln!("error: {e}");
            return ExitCode::from(EXIT_PARAMETER);
        }
    }
    match commands::run(cli.command) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(exit_code(&e))
        }
    }
}
