//! # qfig
//!
//! File formats, experiment runners and reports on top of [`qfig_core`].
//! The `qfig` binary is a thin wrapper over [`run_cli`].

pub mod commands;
pub mod config;
pub mod error;
pub mod io;
pub mod report;

use std::path::PathBuf;

pub use config::{Command, ConfigFile, Overrides, RunConfig};
pub use error::{Error, Result};
pub use report::{Report, Row};

/// Environment variable capping the worker threads of parallel sweeps.
pub const THREADS_VAR: &str = "QFIG_THREADS";

/// Sizes the global thread pool from `QFIG_THREADS`, if set. A pool that is
/// already initialized is left alone.
pub fn configure_threads() -> Result<()> {
    let Ok(raw) = std::env::var(THREADS_VAR) else {
        return Ok(());
    };
    let n: usize = raw
        .trim()
        .parse()
        .ok()
        .filter(|&n| n > 0)
        .ok_or_else(|| Error::config(format!("{THREADS_VAR} must be a positive integer, got `{raw}`")))?;
    let _ = rayon::ThreadPoolBuilder::new().num_threads(n).build_global();
    Ok(())
}

/// Loads, validates and runs one command. With `out` set, the report files
/// are written there; otherwise the JSON goes to stdout.
pub fn run_cli(command: Command, config: Option<PathBuf>, flags: Overrides) -> Result<Report> {
    let file = match &config {
        Some(p) => ConfigFile::load(p)?,
        None => ConfigFile::default(),
    };
    let cfg = RunConfig::resolve(command, file, flags)?;
    configure_threads()?;
    let report = commands::run(&cfg)?;
    match &cfg.out {
        Some(path) => {
            for p in report.write(path)? {
                eprintln!("wrote {}", p.display());
            }
        }
        None => print!("{}", report.to_json()?),
    }
    Ok(report)
}
