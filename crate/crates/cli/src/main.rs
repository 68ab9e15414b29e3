use std::panic;
use std::process::ExitCode;
use std::time::Instant;

use clap::Parser;
use hypan::{configure_threads, run, Cli, THREADS_ENV};

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    let started = Instant::now();
    let threads = std::env::var(THREADS_ENV).ok();
    let result = configure_threads(threads.as_deref()).and_then(|()| {
        // a panic is reported like an input error so exit codes stay within 0/1/2
        panic::catch_unwind(|| run(&cli)).unwrap_or_else(|p| {
            let msg = p
                .downcast_ref::<&str>()
                .map(|s| s.to_string())
                .or_else(|| p.downcast_ref::<String>().cloned())
                .unwrap_or_else(|| "internal error".into());
            Err(hypan::CliError::Usage(msg))
        })
    });
    let code = match result {
        Ok(outcome) => {
            for w in &outcome.warnings {
                eprintln!("hypan: warning: {w}");
            }
            for f in &outcome.failures {
                eprintln!("hypan: check failed: {f}");
            }
            outcome.exit_code()
        }
        Err(e) => {
            eprintln!("{}", e.to_json());
            2
        }
    };
    eprintln!(
        "hypan: {} finished in {:.3}s",
        cli.command.name(),
        started.elapsed().as_secs_f64()
    );
    ExitCode::from(code)
}
