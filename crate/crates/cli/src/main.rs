//! Command-line front end: run scenarios, evaluate objectives, compute oracle values.

use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use multicenter::harness::oracle::oracle_values;
use multicenter::harness::{evaluate_scenario, parse_scenario, run, HarnessError, RunOptions, Scenario};
use multicenter::Point2;

const EXIT_SCENARIO: u8 = 1;
const EXIT_RUNTIME: u8 = 2;

#[derive(Parser)]
#[command(name = "multicenter", version, about = "Multi-center coverage flows on convex polygons")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Integrate a scenario and write the trajectory table, summary and frames.
    Run {
        #[arg(long)]
        scenario: PathBuf,
        /// Output directory (default: the scenario file name without extension).
        #[arg(long)]
        out: Option<PathBuf>,
        /// Also write initial, final and trajectory SVG frames.
        #[arg(long)]
        svg: bool,
    },
    /// Print objective values and criticality of the initial configuration.
    Eval {
        #[arg(long)]
        scenario: PathBuf,
    },
    /// Print brute-force objective values for the initial configuration.
    Oracle {
        #[arg(long)]
        scenario: PathBuf,
        /// Grid points per axis for the covering radius estimate.
        #[arg(long, default_value_t = 500)]
        grid: usize,
    },
}

fn load(path: &Path) -> Result<Scenario, ExitCode> {
    let text = fs::read_to_string(path).map_err(|e| {
        eprintln!("error: cannot read {}: {e}", path.display());
        ExitCode::from(EXIT_SCENARIO)
    })?;
    parse_scenario(&text).map_err(|e| {
        eprintln!("error: {}: {e}", path.display());
        ExitCode::from(EXIT_SCENARIO)
    })
}

fn report(err: HarnessError) -> ExitCode {
    eprintln!("error: {err}");
    match err {
        HarnessError::Scenario(_) => ExitCode::from(EXIT_SCENARIO),
        HarnessError::Flow(_) | HarnessError::Io { .. } => ExitCode::from(EXIT_RUNTIME),
    }
}

fn print_json<T: serde::Serialize>(value: &T) {
    println!(
        "{}",
        serde_json::to_string_pretty(value).expect("report serializes")
    );
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match cli.command {
        Command::Run { scenario, out, svg } => {
            let s = match load(&scenario) {
                Ok(s) => s,
                Err(code) => return code,
            };
            let out = out.unwrap_or_else(|| scenario.with_extension(""));
            match run(&s, &out, RunOptions { svg }) {
                Ok(r) => {
                    print_json(&r.summary);
                    if r.failed() {
                        eprintln!("error: flow stopped early: {:?}", r.summary.terminated_by);
                        ExitCode::from(EXIT_RUNTIME)
                    } else {
                        ExitCode::SUCCESS
                    }
                }
                Err(e) => report(e),
            }
        }
        Command::Eval { scenario } => {
            let s = match load(&scenario) {
                Ok(s) => s,
                Err(code) => return code,
            };
            match evaluate_scenario(&s) {
                Ok(r) => {
                    print_json(&r);
                    ExitCode::SUCCESS
                }
                Err(e) => report(e),
            }
        }
        Command::Oracle { scenario, grid } => {
            let s = match load(&scenario) {
                Ok(s) => s,
                Err(code) => return code,
            };
            let (q, p) = match (s.environment(), s.initial_configuration()) {
                (Ok(q), Ok(p)) => (q, p),
                (_, Err(e)) => return report(e.into()),
                (Err(e), _) => {
                    eprintln!("error: {e}");
                    return ExitCode::from(EXIT_SCENARIO);
                }
            };
            let points: Vec<Point2> = p.points().to_vec();
            print_json(&oracle_values(&q, &points, grid));
            ExitCode::SUCCESS
        }
    }
}
