use std::path::PathBuf;
use std::process::ExitCode;

use clap::Parser;
use qfig::{run_cli, Command, Overrides};

/// Monotone quantum Fisher information, χ² divergences and recovery checks.
///
/// Exit status: 0 when every check holds, 1 on a violated check, 2 on a
/// configuration error.
#[derive(Debug, Parser)]
#[command(name = "qfig", version)]
struct Cli {
    #[arg(value_enum)]
    command: Command,

    /// JSON config file; flags override its fields.
    #[arg(long)]
    config: Option<PathBuf>,

    #[arg(long)]
    seed: Option<u64>,

    /// Report path (JSON). A CSV with the same stem is written next to it.
    #[arg(long)]
    out: Option<PathBuf>,

    #[arg(long)]
    trials: Option<usize>,

    /// Comma-separated dimensions, e.g. `2,3,4`.
    #[arg(long, value_delimiter = ',')]
    dims: Option<Vec<usize>>,

    /// Comma-separated metric names: sld, rld, bkm, sym-inv, alpha:<a>, wyd:<a>.
    #[arg(long, value_delimiter = ',')]
    metrics: Option<Vec<String>>,

    /// Sufficiency tolerance on metric gaps.
    #[arg(long)]
    tol: Option<f64>,

    #[arg(long)]
    grid: Option<usize>,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let flags = Overrides {
        seed: cli.seed,
        trials: cli.trials,
        dims: cli.dims,
        metrics: cli.metrics,
        tol: cli.tol,
        grid: cli.grid,
        out: cli.out,
    };
    match run_cli(cli.command, cli.config, flags) {
        Ok(report) => {
            let s = &report.summary;
            eprintln!("{}: {} checks, {} violations, {} errors", report.command, s.checks, s.violations, s.errors);
            for row in report.rows.iter().filter(|r| !r.satisfied).take(10) {
                eprintln!("  FAIL instance {} {}: lhs {:e} rhs {:e}{}", row.instance_id, row.check, row.lhs, row.rhs,
                    row.error.as_deref().map(|e| format!(" ({e})")).unwrap_or_default());
            }
            ExitCode::from(report.exit_code())
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
