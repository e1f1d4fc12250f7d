//! `placy`: spectral causal discovery from the command line.
//!
//! Exit status: 0 on success, 2 for unreadable or unwritable files, 3 for
//! malformed input or invalid options, 4 when the analysis fails.

mod commands;
mod error;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use placy_core::discovery::{DEFAULT_ALPHA, DEFAULT_WINDOW_CANDIDATES};
use placy_core::granger::DEFAULT_MAX_LAG;
use placy_core::spectral::{DEFAULT_STRIDE, DEFAULT_WINDOW};
use placy_core::synth::DEFAULT_LAG;
use placy_core::{InterceptRole, Method, ScenarioKind};

use crate::error::Failure;

#[derive(Debug, Parser)]
#[command(name = "placy", version, about = "Causal discovery on power-law spectral features of time series")]
struct Cli {
    /// Worker threads (0 = one per core).
    #[arg(long, global = true, env = "PLACY_THREADS")]
    threads: Option<usize>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Infer a causal graph from the spectral features of each series.
    Discover(DiscoverArgs),
    /// Infer a causal graph with Granger tests on the raw series.
    Baseline(BaselineArgs),
    /// Generate a synthetic dataset with a known causal graph.
    Gen(GenArgs),
    /// Run the multi-seed benchmark over a grid of synthetic scenarios.
    Bench(BenchArgs),
    /// Choose a window length per variable from the median slope p-value.
    SelectWindow(SelectWindowArgs),
}

#[derive(Debug, Args)]
struct InputArgs {
    /// CSV file with a header of variable names and one row per time step.
    #[arg(long)]
    input: PathBuf,

    /// Reject missing cells instead of interpolating them.
    #[arg(long)]
    no_interpolate: bool,

    /// Analyse disjoint consecutive blocks instead of the whole series.
    #[arg(long)]
    sample: bool,

    #[arg(long, default_value_t = 500, requires = "sample")]
    sample_length: usize,

    /// Ground-truth JSON written by `gen`; adds edge scores to the report.
    #[arg(long)]
    truth: Option<PathBuf>,
}

#[derive(Debug, Args)]
struct TestArgs {
    #[arg(long, default_value_t = DEFAULT_MAX_LAG)]
    max_lag: usize,

    #[arg(long, default_value_t = DEFAULT_ALPHA)]
    alpha: f64,
}

#[derive(Debug, Args)]
struct WindowArgs {
    #[arg(long, default_value_t = DEFAULT_WINDOW)]
    window: usize,

    #[arg(long, default_value_t = DEFAULT_STRIDE)]
    stride: usize,
}

#[derive(Debug, Args)]
pub struct DiscoverArgs {
    #[command(flatten)]
    input: InputArgs,

    #[command(flatten)]
    window: WindowArgs,

    #[command(flatten)]
    test: TestArgs,

    /// Select the window length from the data; `--window` is then ignored.
    #[arg(long)]
    auto_window: bool,

    #[arg(long, value_delimiter = ',', default_values_t = DEFAULT_WINDOW_CANDIDATES)]
    window_candidates: Vec<usize>,

    /// How the intercept series of the cause enters each test.
    #[arg(long, default_value = "causing", value_parser = parse_role)]
    intercept_role: InterceptRole,

    /// Graph JSON; the p-value table goes next to it as `<stem>_pvalues.csv`.
    #[arg(long)]
    out: PathBuf,
}

#[derive(Debug, Args)]
pub struct BaselineArgs {
    #[command(flatten)]
    input: InputArgs,

    #[command(flatten)]
    test: TestArgs,

    #[arg(long)]
    out: PathBuf,
}

#[derive(Debug, Args)]
pub struct GenArgs {
    #[arg(long, default_value = "ou")]
    scenario: ScenarioKind,

    #[arg(long, default_value_t = 5)]
    n_vars: usize,

    #[arg(long, default_value_t = 5000)]
    length: usize,

    #[arg(long)]
    causal_strength: Option<f64>,

    #[arg(long, default_value_t = DEFAULT_LAG)]
    lag_tau: usize,

    #[arg(long)]
    edge_prob: Option<f64>,

    #[arg(long)]
    sigma_b: Option<f64>,

    #[arg(long)]
    sigma_ga: Option<f64>,

    /// Multiplicative volatility; only used by the `*-mult` scenarios.
    #[arg(long)]
    sigma_gm: Option<f64>,

    #[arg(long, default_value_t = 0)]
    seed: u64,

    /// Data CSV; the ground truth goes next to it as `<stem>_truth.json`.
    #[arg(long)]
    out: PathBuf,
}

#[derive(Debug, Args)]
pub struct BenchArgs {
    /// JSON benchmark spec; any grid flag given on the command line overrides it.
    #[arg(long)]
    spec: Option<PathBuf>,

    #[arg(long, value_delimiter = ',')]
    scenario: Option<Vec<ScenarioKind>>,

    #[arg(long, value_delimiter = ',')]
    n_vars: Option<Vec<usize>>,

    #[arg(long, value_delimiter = ',')]
    sigma_b: Option<Vec<f64>>,

    #[arg(long, value_delimiter = ',')]
    sigma_ga: Option<Vec<f64>>,

    #[arg(long)]
    sigma_gm: Option<f64>,

    #[arg(long)]
    causal_strength: Option<f64>,

    #[arg(long)]
    length: Option<usize>,

    #[arg(long)]
    lag_tau: Option<usize>,

    #[arg(long)]
    edge_prob: Option<f64>,

    /// Seed list such as `0..100` (end exclusive) or `1,4,9`.
    #[arg(long, value_parser = parse_seeds)]
    seeds: Option<Seeds>,

    #[arg(long, value_delimiter = ',')]
    methods: Option<Vec<Method>>,

    #[arg(long)]
    window: Option<usize>,

    #[arg(long)]
    stride: Option<usize>,

    #[arg(long)]
    max_lag: Option<usize>,

    #[arg(long)]
    alpha: Option<f64>,

    #[arg(long)]
    auto_window: bool,

    /// Output directory for `raw.csv`, `aggregate.csv`, `aggregate.json` and `spec.json`.
    #[arg(long)]
    out: PathBuf,
}

#[derive(Debug, Args)]
pub struct SelectWindowArgs {
    #[arg(long)]
    input: PathBuf,

    #[arg(long)]
    no_interpolate: bool,

    #[arg(long, value_delimiter = ',', default_values_t = DEFAULT_WINDOW_CANDIDATES)]
    candidates: Vec<usize>,

    #[arg(long, default_value_t = DEFAULT_ALPHA)]
    alpha: f64,

    /// JSON report; a table is printed to stdout either way.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Debug, Clone)]
pub struct Seeds(pub Vec<u64>);

fn parse_seeds(text: &str) -> Result<Seeds, String> {
    let bad = |e: std::num::ParseIntError| format!("invalid seed list `{text}`: {e}");
    if let Some((lo, hi)) = text.split_once("..") {
        let (lo, hi): (u64, u64) = (lo.trim().parse().map_err(bad)?, hi.trim().parse().map_err(bad)?);
        if lo >= hi {
            return Err(format!("empty seed range `{text}`"));
        }
        return Ok(Seeds((lo..hi).collect()));
    }
    text.split(',')
        .map(|s| s.trim().parse().map_err(bad))
        .collect::<Result<_, _>>()
        .map(Seeds)
}

fn parse_role(text: &str) -> Result<InterceptRole, String> {
    serde_json::from_value(serde_json::Value::from(text))
        .map_err(|_| format!("unknown intercept role `{text}` (expected causing, covariate or excluded)"))
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { Failure::Config as u8 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    if let Some(n) = cli.threads {
        if let Err(e) = rayon::ThreadPoolBuilder::new().num_threads(n).build_global() {
            eprintln!("error: thread pool: {e}");
            return ExitCode::from(Failure::Config as u8);
        }
    }
    let threads = cli.threads.unwrap_or(0);
    let result = match cli.command {
        Command::Discover(args) => commands::discover(args),
        Command::Baseline(args) => commands::baseline(args),
        Command::Gen(args) => commands::generate(args),
        Command::Bench(args) => commands::bench(args, threads),
        Command::SelectWindow(args) => commands::select_window(args),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
