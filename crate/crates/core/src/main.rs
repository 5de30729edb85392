//! Command-line front end: run one scenario or a directory of them, write
//! trajectory CSVs and verdict summaries, and exit nonzero when checks fail.
//!
//! Exit codes: 0 all checks pass, 1 check failure, 2 load/validation error,
//! 3 internal error (I/O and similar).

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

#[cfg(feature = "parallel")]
use rayon::prelude::*;

use spoofsim::scenario::{self, Check, ScenarioConfig};
use spoofsim::verdict::evaluate;
use spoofsim::Simulation;

#[derive(Parser)]
#[command(
    name = "spoofsim",
    about = "Deterministic LiDAR/GPS spoofing and jamming attack simulations on an autonomous quadcopter",
    arg_required_else_help = true
)]
struct Cli {
    /// List the available verdict checks and exit.
    #[arg(long, exclusive = true)]
    list_checks: bool,

    #[command(subcommand)]
    command: Option<Command>,
}

#[derive(Subcommand)]
enum Command {
    /// Run a single scenario file.
    Run {
        /// Path to a scenario TOML file.
        scenario: PathBuf,
        #[command(flatten)]
        opts: RunOpts,
    },
    /// Run every `*.toml` scenario in a directory.
    RunAll {
        /// Directory containing scenario files.
        dir: PathBuf,
        #[command(flatten)]
        opts: RunOpts,
    },
}

#[derive(Args, Clone)]
struct RunOpts {
    /// Override the scenario seed (also reseeds jam attack streams).
    #[arg(long)]
    seed: Option<u64>,

    /// Directory for trajectory CSVs and verdict summaries.
    #[arg(long, default_value = "out")]
    out: PathBuf,

    /// Log every k-th tick to the trajectory CSV (verdicts always use full
    /// resolution).
    #[arg(long, default_value_t = 10)]
    log_every: u64,
}

const EXIT_CHECK_FAILURE: u8 = 1;
const EXIT_LOAD_ERROR: u8 = 2;
const EXIT_INTERNAL: u8 = 3;

/// Print without panicking when stdout is a closed pipe (e.g. `| head`).
fn emit(text: &str) {
    use std::io::Write;
    let _ = std::io::stdout().write_all(text.as_bytes());
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    if cli.list_checks {
        for (name, description) in Check::catalog() {
            emit(&format!("{name:42} {description}\n"));
        }
        return ExitCode::SUCCESS;
    }
    let code = match cli.command {
        Some(Command::Run { scenario, opts }) => {
            let (report, code) = run_one(&scenario, &opts);
            emit(&report);
            code
        }
        Some(Command::RunAll { dir, opts }) => run_all(&dir, &opts),
        None => EXIT_LOAD_ERROR,
    };
    ExitCode::from(code)
}

fn apply_seed_override(cfg: &mut ScenarioConfig, seed: Option<u64>) {
    if let Some(seed) = seed {
        cfg.seed = seed;
        if let Some(attack) = cfg.attack.as_mut() {
            attack.seed = seed;
        }
    }
}

/// Run one scenario and return its printable report plus exit code.
fn run_one(path: &Path, opts: &RunOpts) -> (String, u8) {
    let mut cfg = match scenario::load_scenario(path) {
        Ok(cfg) => cfg,
        Err(err) => return (format!("{}: {err}\n", path.display()), EXIT_LOAD_ERROR),
    };
    apply_seed_override(&mut cfg, opts.seed);

    let output = Simulation::new(&cfg, opts.log_every).run();
    let verdict = evaluate(&cfg, &output.stats);

    if let Err(err) = std::fs::create_dir_all(&opts.out) {
        return (
            format!("cannot create {}: {err}\n", opts.out.display()),
            EXIT_INTERNAL,
        );
    }
    let csv_path = opts.out.join(format!("{}.csv", cfg.id));
    if let Err(err) = output.log.write_csv(&csv_path) {
        return (
            format!("cannot write {}: {err}\n", csv_path.display()),
            EXIT_INTERNAL,
        );
    }
    let verdict_path = opts.out.join(format!("{}.verdict.txt", cfg.id));
    if let Err(err) = std::fs::write(&verdict_path, verdict.render()) {
        return (
            format!("cannot write {}: {err}\n", verdict_path.display()),
            EXIT_INTERNAL,
        );
    }

    let code = if verdict.all_pass() {
        0
    } else {
        EXIT_CHECK_FAILURE
    };
    let mut report = verdict.render();
    report.push_str(&format!(
        "trajectory: {}\nverdict: {}\n",
        csv_path.display(),
        verdict_path.display()
    ));
    (report, code)
}

fn run_all(dir: &Path, opts: &RunOpts) -> u8 {
    let mut paths: Vec<PathBuf> = match std::fs::read_dir(dir) {
        Ok(entries) => entries
            .filter_map(|e| e.ok())
            .map(|e| e.path())
            .filter(|p| p.extension().is_some_and(|ext| ext == "toml"))
            .collect(),
        Err(err) => {
            eprintln!("cannot read {}: {err}", dir.display());
            return EXIT_LOAD_ERROR;
        }
    };
    paths.sort();
    if paths.is_empty() {
        eprintln!("no scenario files in {}", dir.display());
        return EXIT_LOAD_ERROR;
    }

    // Independent scenarios; logs land in disjoint files, so they can run on
    // worker threads. Reports are printed afterwards in input order.
    #[cfg(feature = "parallel")]
    let results: Vec<(String, u8)> = paths.par_iter().map(|p| run_one(p, opts)).collect();
    #[cfg(not(feature = "parallel"))]
    let results: Vec<(String, u8)> = paths.iter().map(|p| run_one(p, opts)).collect();

    let mut code = 0u8;
    for (path, (report, one_code)) in paths.iter().zip(&results) {
        emit(&format!("=== {} ===\n{report}\n", path.display()));
        code = code.max(*one_code);
    }
    let passed = results.iter().filter(|(_, c)| *c == 0).count();
    emit(&format!("{passed}/{} scenarios passed\n", results.len()));
    code
}
