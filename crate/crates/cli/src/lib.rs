//! Command-line front end: builds per-window artifacts from message
//! streams and writes one JSON report per analysis command.

pub mod args;
pub mod artifacts;
pub mod commands;
pub mod config;
pub mod error;

use std::ffi::OsString;
use std::path::PathBuf;

use clap::Parser;

use crate::args::{Cli, Command};
use crate::commands::ShiftOptions;
use crate::config::RunConfig;
use crate::error::{CliError, Result};

/// Environment variable capping the worker thread count.
pub const THREADS_ENV: &str = "HEDONET_THREADS";

/// Runs one parsed invocation and returns the path of the report it wrote.
pub fn run(cli: Cli) -> Result<PathBuf> {
    let cfg = RunConfig::from_args(&cli.global)?;
    match cli.command {
        Command::Build => commands::cmd_build(&cfg),
        Command::Stats => commands::cmd_stats(&cfg),
        Command::Happiness => commands::cmd_happiness(&cfg),
        Command::Assort { pairs_csv } => commands::cmd_assort(&cfg, pairs_csv),
        Command::Nullmodel => commands::cmd_nullmodel(&cfg),
        Command::Powerlaw => commands::cmd_powerlaw(&cfg),
        Command::Wordshift { degree_split, reference_window, percent, top } => commands::cmd_wordshift(
            &cfg,
            &ShiftOptions { degree_split, reference_window, percent, top },
        ),
        Command::Similarity => commands::cmd_similarity(&cfg),
        Command::Coverage => commands::cmd_coverage(&cfg),
        Command::Sweep { param, values } => commands::cmd_sweep(&cfg, param, &values),
        Command::Export { format } => commands::cmd_export(&cfg, format),
    }
}

/// Parses `args` and runs them, for in-process callers.
pub fn run_args<I, T>(args: I) -> Result<PathBuf>
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = Cli::try_parse_from(args).map_err(|e| CliError::Usage(e.to_string()))?;
    run(cli)
}

fn configure_threads() -> Result<()> {
    let Ok(raw) = std::env::var(THREADS_ENV) else {
        return Ok(());
    };
    let n: usize = raw
        .trim()
        .parse()
        .ok()
        .filter(|&n| n >= 1)
        .ok_or_else(|| CliError::Param(format!("{THREADS_ENV} must be a positive integer, got `{raw}`")))?;
    // A pool may already exist when embedded; the first setting wins.
    let _ = rayon::ThreadPoolBuilder::new().num_threads(n).build_global();
    Ok(())
}

/// Binary entry point: prints the report path on success, or a JSON error
/// on stderr. Returns the process exit code.
pub fn main_with_args<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) if !e.use_stderr() => {
            // --help and --version
            let _ = e.print();
            return 0;
        }
        Err(e) => {
            let err = CliError::Usage(e.to_string().trim_end().to_owned());
            eprintln!("{}", err.to_json());
            return err.exit_code();
        }
    };
    match configure_threads().and_then(|()| run(cli)) {
        Ok(path) => {
            println!("{}", serde_json::json!({ "report": path.display().to_string() }));
            0
        }
        Err(e) => {
            eprintln!("{}", e.to_json());
            e.exit_code()
        }
    }
}
