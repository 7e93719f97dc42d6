//! `hamsim`: batch front door for the Hamiltonian simulation workbench.
//!
//! Subcommands: `simulate`, `trotter`, `compare`, `sweep`, `selftest`.
//! Reports are JSON (comparison tables also CSV by extension); identical
//! invocations with the same seed produce byte-identical files. Exit codes:
//! 0 success, 2 precondition violation (machine-readable JSON on stderr),
//! 64 usage, 74 i/o.

mod output;
mod selftest;

use std::path::{Path, PathBuf};
use std::sync::atomic::{AtomicUsize, Ordering};
use std::sync::Mutex;
use std::time::Instant;

use clap::{Args, Parser, Subcommand};

use hamsim_core::hamlib::{self, HamiltonianSum};
use hamsim_core::pipeline::{self, ExecutionMode, SimulationReport};
use hamsim_core::Error;

const EXIT_DOMAIN: i32 = 2;
const EXIT_USAGE: i32 = 64;
const EXIT_IO: i32 = 74;

#[derive(Parser)]
#[command(name = "hamsim", version, about = "Hamiltonian simulation workbench", disable_help_subcommand = true)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Clone)]
struct CommonArgs {
    /// Hamiltonian spec document (JSON).
    #[arg(long = "ham", value_name = "PATH")]
    ham: PathBuf,
    /// Evolution time t.
    #[arg(long = "time", value_name = "FLOAT")]
    time: f64,
    /// Report path.
    #[arg(long = "out", value_name = "PATH")]
    out: PathBuf,
    /// Measure wall time into reports (breaks byte-reproducibility).
    #[arg(long)]
    timing: bool,
}

#[derive(Subcommand)]
enum Command {
    /// Simulate exp(-iHt) through the encoding route.
    Simulate {
        #[command(flatten)]
        common: CommonArgs,
        /// Target spectral-norm error.
        #[arg(long, value_name = "FLOAT")]
        delta: f64,
        /// Execution mode.
        #[arg(long, value_name = "MODE", default_value = "block-tracked")]
        mode: String,
        /// Also run the product-formula baseline at this order.
        #[arg(long = "trotter-k", value_name = "INT")]
        trotter_k: Option<u32>,
        /// Seed for randomized instance generation (reserved).
        #[arg(long, value_name = "INT", default_value_t = 0)]
        seed: u64,
    },
    /// Segmented product-formula evolution only.
    Trotter {
        #[command(flatten)]
        common: CommonArgs,
        /// Target spectral-norm error (picks r from the bound).
        #[arg(long, value_name = "FLOAT")]
        delta: f64,
        /// Formula order parameter k (order 2k).
        #[arg(long = "trotter-k", value_name = "INT", default_value_t = 1)]
        trotter_k: u32,
        /// Fixed segment count, bypassing the bound inversion.
        #[arg(long, value_name = "INT")]
        segments: Option<u64>,
    },
    /// Sweep deltas through both routes and fit the cost scaling.
    Compare {
        #[command(flatten)]
        common: CommonArgs,
        /// Descending comma-separated error targets.
        #[arg(long, value_name = "LIST")]
        deltas: String,
        #[arg(long = "trotter-k", value_name = "INT", default_value_t = 1)]
        trotter_k: u32,
        /// Also write gnuplot data files with this stem.
        #[arg(long = "plot-data", value_name = "STEM")]
        plot_data: Option<PathBuf>,
    },
    /// Run simulate at each delta; JSON array of reports.
    Sweep {
        #[command(flatten)]
        common: CommonArgs,
        #[arg(long, value_name = "LIST")]
        deltas: String,
        #[arg(long, value_name = "MODE", default_value = "block-tracked")]
        mode: String,
        /// Parallel tasks.
        #[arg(long, value_name = "INT", default_value_t = 1)]
        jobs: usize,
    },
    /// Run the built-in invariant suite.
    Selftest {
        /// Seed for the randomized checks.
        #[arg(long, value_name = "INT", default_value_t = 0)]
        seed: u64,
    },
}

fn main() {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            // help/version requests are successes, not usage errors
            let code = if e.exit_code() == 0 { 0 } else { EXIT_USAGE };
            let _ = e.print();
            std::process::exit(code);
        }
    };
    match run(cli) {
        Ok(code) => std::process::exit(code),
        Err(e) => {
            eprintln!(
                "{}",
                serde_json::json!({ "error": { "kind": e.kind(), "message": e.to_string() } })
            );
            let code = match e {
                Error::Io(_) => EXIT_IO,
                _ => EXIT_DOMAIN,
            };
            std::process::exit(code);
        }
    }
}

fn load_ham(path: &Path) -> Result<HamiltonianSum, Error> {
    let text = std::fs::read_to_string(path)?;
    let doc = hamlib::HamiltonianSpecDoc::from_json(&text)?;
    hamlib::load_hamiltonian(&doc)
}

fn parse_deltas(list: &str) -> Result<Vec<f64>, Error> {
    let deltas: Vec<f64> = list
        .split(',')
        .map(|s| {
            s.trim()
                .parse::<f64>()
                .map_err(|_| Error::ParseError(format!("bad delta {s:?}")))
        })
        .collect::<Result<_, _>>()?;
    if deltas.is_empty() {
        return Err(Error::EmptyList);
    }
    Ok(deltas)
}

fn run(cli: Cli) -> Result<i32, Error> {
    match cli.command {
        Command::Simulate { common, delta, mode, trotter_k, seed } => {
            let _ = seed; // no randomized inputs on this path yet
            let mode: ExecutionMode = mode.parse()?;
            let ham = load_ham(&common.ham)?;
            let started = Instant::now();
            let (_, mut report) = pipeline::simulate(&ham, common.time, delta, mode)?;
            if let Some(k) = trotter_k {
                report.trotter = Some(pipeline::run_trotter(&ham, common.time, delta, k)?);
            }
            if common.timing {
                report.wall_time_s = started.elapsed().as_secs_f64();
            }
            output::write_json(&common.out, &report)?;
            Ok(0)
        }
        Command::Trotter { common, delta, trotter_k, segments } => {
            let ham = load_ham(&common.ham)?;
            let report = match segments {
                Some(r) => pipeline::run_trotter_at(&ham, common.time, r, trotter_k, f64::NAN)?,
                None => pipeline::run_trotter(&ham, common.time, delta, trotter_k)?,
            };
            output::write_json(&common.out, &report)?;
            Ok(0)
        }
        Command::Compare { common, deltas, trotter_k, plot_data } => {
            let ham = load_ham(&common.ham)?;
            let deltas = parse_deltas(&deltas)?;
            let started = Instant::now();
            let mut table = pipeline::compare(&ham, common.time, &deltas, trotter_k)?;
            if common.timing {
                let elapsed = started.elapsed().as_secs_f64();
                for row in &mut table.rows {
                    row.wall_time_s = elapsed / deltas.len() as f64;
                }
            }
            if common.out.extension().and_then(|e| e.to_str()) == Some("csv") {
                std::fs::write(&common.out, output::comparison_csv(&table))?;
            } else {
                output::write_json(&common.out, &table)?;
            }
            if let Some(stem) = plot_data {
                output::emit_plot_data(&table, &stem)?;
            }
            Ok(0)
        }
        Command::Sweep { common, deltas, mode, jobs } => {
            let mode: ExecutionMode = mode.parse()?;
            let ham = load_ham(&common.ham)?;
            let deltas = parse_deltas(&deltas)?;
            let reports = run_sweep(&ham, common.time, &deltas, mode, jobs.max(1), common.timing)?;
            output::write_json(&common.out, &reports)?;
            Ok(0)
        }
        Command::Selftest { seed } => {
            let (_, failed) = selftest::run(seed);
            Ok(if failed == 0 { 0 } else { 1 })
        }
    }
}

/// Fan the sweep points out over up to `jobs` threads; results keep input
/// order, and only this coordinating thread writes files.
fn run_sweep(
    ham: &HamiltonianSum,
    t: f64,
    deltas: &[f64],
    mode: ExecutionMode,
    jobs: usize,
    timing: bool,
) -> Result<Vec<SimulationReport>, Error> {
    let next = AtomicUsize::new(0);
    let slots: Mutex<Vec<Option<Result<SimulationReport, Error>>>> =
        Mutex::new((0..deltas.len()).map(|_| None).collect());

    std::thread::scope(|scope| {
        for _ in 0..jobs.min(deltas.len()) {
            scope.spawn(|| loop {
                let i = next.fetch_add(1, Ordering::SeqCst);
                if i >= deltas.len() {
                    break;
                }
                let started = Instant::now();
                let result = pipeline::simulate(ham, t, deltas[i], mode).map(|(_, mut rep)| {
                    if timing {
                        rep.wall_time_s = started.elapsed().as_secs_f64();
                    }
                    rep
                });
                slots.lock().expect("sweep slots")[i] = Some(result);
            });
        }
    });

    slots
        .into_inner()
        .expect("sweep slots")
        .into_iter()
        .map(|slot| slot.expect("every sweep index visited"))
        .collect()
}
