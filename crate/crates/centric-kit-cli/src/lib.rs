//! Command-line harness over the `centric-kit` library.
//!
//! Exit codes: 0 on success (and verified suites), 1 for usage or
//! validation errors, 2 when a verification run reports a violation.

pub mod args;
pub mod commands;
pub mod experiment;
pub mod plot;

use clap::Parser;

/// Caps the rayon worker count from `CENTRIC_KIT_THREADS` (0 or unset =
/// automatic). Results do not depend on the cap; only wall time does.
pub fn init_thread_pool() {
    if let Ok(value) = std::env::var("CENTRIC_KIT_THREADS") {
        if let Ok(n) = value.trim().parse::<usize>() {
            if n > 0 {
                let _ = rayon::ThreadPoolBuilder::new().num_threads(n).build_global();
            }
        }
    }
}

/// Parses argv, dispatches, and returns the process exit code.
pub fn run() -> i32 {
    init_thread_pool();
    let cli = match args::Cli::try_parse() {
        Ok(cli) => cli,
        Err(err) => {
            use clap::error::ErrorKind;
            let code = match err.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => 0,
                _ => 1,
            };
            let _ = err.print();
            return code;
        }
    };
    let outcome = match &cli.command {
        args::Command::Generate(a) => commands::generate(a),
        args::Command::Transform(a) => commands::transform(a),
        args::Command::Cluster(a) => commands::cluster(a),
        args::Command::Verify(a) => commands::verify(a),
        args::Command::Experiment(a) => commands::experiment(a),
        args::Command::Plot(a) => commands::plot(a),
    };
    match outcome {
        Ok(code) => code,
        Err(err) => {
            eprintln!("error: {err:#}");
            1
        }
    }
}
