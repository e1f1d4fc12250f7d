//! Multi-seed benchmark over the synthetic scenario grid.
//!
//! Every (cell, seed) pair generates one dataset that all requested methods
//! are run on. Results are collected in grid order, so the emitted tables do
//! not depend on how many threads executed the runs.

use std::io::Write;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::dataset::format_f64;
use crate::discovery::{run_method, DiscoveryConfig, Method};
use crate::error::{Error, Result};
use crate::metrics::{evaluate, EvalReport};
use crate::synth::{make_scenario, OuParams, ScenarioKind, ScenarioSpec, DEFAULT_CAUSAL_STRENGTH, DEFAULT_EDGE_PROB, DEFAULT_LAG, DEFAULT_SIGMA_GM};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct BenchmarkSpec {
    pub scenarios: Vec<ScenarioKind>,
    pub sigma_b: Vec<f64>,
    pub sigma_ga: Vec<f64>,
    pub n_vars: Vec<usize>,
    /// Multiplicative volatility for the `*-mult` scenarios.
    pub sigma_gm: f64,
    pub causal_strength: f64,
    pub length: usize,
    pub lag: usize,
    pub edge_prob: f64,
    pub seeds: Vec<u64>,
    pub methods: Vec<Method>,
    pub discovery: DiscoveryConfig,
}

impl Default for BenchmarkSpec {
    fn default() -> Self {
        Self {
            scenarios: ScenarioKind::ALL.to_vec(),
            sigma_b: vec![0.0, 0.1, 0.5, 1.0],
            sigma_ga: vec![0.5, 1.0],
            n_vars: vec![5, 10],
            sigma_gm: DEFAULT_SIGMA_GM,
            causal_strength: DEFAULT_CAUSAL_STRENGTH,
            length: 5000,
            lag: DEFAULT_LAG,
            edge_prob: DEFAULT_EDGE_PROB,
            seeds: (0..100).collect(),
            methods: vec![Method::Placy, Method::Granger],
            discovery: DiscoveryConfig::default(),
        }
    }
}

/// One point of the scenario grid.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Cell {
    pub scenario: ScenarioKind,
    pub n_vars: usize,
    pub sigma_b: f64,
    pub sigma_ga: f64,
}

impl BenchmarkSpec {
    pub fn validate(&self) -> Result<()> {
        let nonempty = |ok: bool, what: &str| {
            if ok {
                Ok(())
            } else {
                Err(Error::InvalidInput(format!("benchmark {what} list is empty")))
            }
        };
        nonempty(!self.seeds.is_empty(), "seed")?;
        nonempty(!self.scenarios.is_empty(), "scenario")?;
        nonempty(!self.sigma_b.is_empty(), "sigma_b")?;
        nonempty(!self.sigma_ga.is_empty(), "sigma_ga")?;
        nonempty(!self.n_vars.is_empty(), "n_vars")?;
        nonempty(!self.methods.is_empty(), "method")?;
        let grid = self
            .sigma_b
            .iter()
            .chain(&self.sigma_ga)
            .chain([&self.sigma_gm, &self.causal_strength, &self.edge_prob]);
        for &v in grid {
            if !v.is_finite() || v < 0.0 {
                return Err(Error::InvalidInput(format!(
                    "benchmark grid values must be finite and non-negative, got {v}"
                )));
            }
        }
        if self.n_vars.contains(&0) {
            return Err(Error::InvalidInput("n_vars must be positive".into()));
        }
        self.discovery.validate()
    }

    /// Grid cells in output order: scenario, then `n_vars`, `sigma_b`, `sigma_ga`.
    pub fn cells(&self) -> Vec<Cell> {
        let mut out = Vec::new();
        for &scenario in &self.scenarios {
            for &n_vars in &self.n_vars {
                for &sigma_b in &self.sigma_b {
                    for &sigma_ga in &self.sigma_ga {
                        out.push(Cell {
                            scenario,
                            n_vars,
                            sigma_b,
                            sigma_ga,
                        });
                    }
                }
            }
        }
        out
    }

    pub fn scenario(&self, cell: &Cell, seed: u64) -> ScenarioSpec {
        let mut spec = ScenarioSpec::new(cell.scenario, cell.n_vars, self.length, seed);
        spec.ou = OuParams {
            sigma_b: cell.sigma_b,
            sigma_ga: cell.sigma_ga,
            sigma_gm: self.sigma_gm,
            ..spec.ou
        };
        spec.causal_strength = self.causal_strength;
        spec.lag = self.lag;
        spec.edge_prob = self.edge_prob;
        spec
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RawRow {
    pub cell: Cell,
    pub seed: u64,
    pub method: Method,
    /// `Err` carries the message of a failed run.
    pub outcome: std::result::Result<EvalReport, String>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct AggregateRow {
    pub cell: Cell,
    pub method: Method,
    pub runs: usize,
    pub failed: usize,
    pub f1_mean: f64,
    pub f1_std: f64,
    pub tnr_mean: f64,
    pub tnr_std: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BenchOutcome {
    pub raw: Vec<RawRow>,
    pub aggregate: Vec<AggregateRow>,
}

fn run_seed(spec: &BenchmarkSpec, cell: Cell, seed: u64) -> Vec<RawRow> {
    let scenario = make_scenario(&spec.scenario(&cell, seed));
    spec.methods
        .iter()
        .map(|&method| {
            let outcome = match &scenario {
                Ok((data, truth)) => run_method(method, data, &spec.discovery)
                    .and_then(|g| evaluate(&g, truth))
                    .map_err(|e| e.to_string()),
                Err(e) => Err(e.to_string()),
            };
            RawRow {
                cell,
                seed,
                method,
                outcome,
            }
        })
        .collect()
}

/// Mean and population standard deviation.
fn mean_std(values: &[f64]) -> (f64, f64) {
    if values.is_empty() {
        return (f64::NAN, f64::NAN);
    }
    let n = values.len() as f64;
    let mean = values.iter().sum::<f64>() / n;
    let var = values.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / n;
    (mean, var.sqrt())
}

fn aggregate(spec: &BenchmarkSpec, raw: &[RawRow]) -> Vec<AggregateRow> {
    let mut out = Vec::new();
    for cell in spec.cells() {
        for &method in &spec.methods {
            let rows: Vec<&RawRow> = raw.iter().filter(|r| r.cell == cell && r.method == method).collect();
            let ok: Vec<&EvalReport> = rows.iter().filter_map(|r| r.outcome.as_ref().ok()).collect();
            let (f1_mean, f1_std) = mean_std(&ok.iter().map(|r| r.f1).collect::<Vec<_>>());
            let (tnr_mean, tnr_std) = mean_std(&ok.iter().map(|r| r.tnr).collect::<Vec<_>>());
            out.push(AggregateRow {
                cell,
                method,
                runs: ok.len(),
                failed: rows.len() - ok.len(),
                f1_mean,
                f1_std,
                tnr_mean,
                tnr_std,
            });
        }
    }
    out
}

/// Runs the whole grid on a pool of `threads` workers (0 = rayon default).
pub fn run_bench(spec: &BenchmarkSpec, threads: usize) -> Result<BenchOutcome> {
    spec.validate()?;
    let jobs: Vec<(Cell, u64)> = spec
        .cells()
        .into_iter()
        .flat_map(|c| spec.seeds.iter().map(move |&s| (c, s)))
        .collect();
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(threads)
        .build()
        .map_err(|e| Error::InvalidInput(format!("thread pool: {e}")))?;
    let raw: Vec<RawRow> = pool.install(|| {
        jobs.par_iter()
            .flat_map_iter(|&(cell, seed)| run_seed(spec, cell, seed))
            .collect()
    });
    let aggregate = aggregate(spec, &raw);
    Ok(BenchOutcome { raw, aggregate })
}

const RAW_HEADER: [&str; 19] = [
    "scenario", "n_vars", "sigma_b", "sigma_ga", "sigma_gm", "causal_strength", "length", "seed", "method", "status", "f1",
    "tnr", "precision", "recall", "tp", "fp", "tn", "fn", "error",
];

const AGGREGATE_HEADER: [&str; 11] = [
    "scenario", "n_vars", "sigma_b", "sigma_ga", "method", "runs", "failed", "f1_mean", "f1_std", "tnr_mean", "tnr_std",
];

fn cell_sigma_gm(spec: &BenchmarkSpec, cell: &Cell) -> f64 {
    if cell.scenario.multiplicative() {
        spec.sigma_gm
    } else {
        0.0
    }
}

/// One row per cell, seed and method.
pub fn write_raw_csv<W: Write>(spec: &BenchmarkSpec, outcome: &BenchOutcome, writer: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(writer);
    w.write_record(RAW_HEADER)?;
    for row in &outcome.raw {
        let c = &row.cell;
        let mut record = vec![
            c.scenario.to_string(),
            c.n_vars.to_string(),
            format_f64(c.sigma_b),
            format_f64(c.sigma_ga),
            format_f64(cell_sigma_gm(spec, c)),
            format_f64(spec.causal_strength),
            spec.length.to_string(),
            row.seed.to_string(),
            row.method.to_string(),
        ];
        match &row.outcome {
            Ok(r) => {
                record.push("ok".into());
                record.extend([r.f1, r.tnr, r.precision, r.recall].map(format_f64));
                record.extend([r.tp, r.fp, r.tn, r.fn_].map(|v| v.to_string()));
                record.push(String::new());
            }
            Err(msg) => {
                record.push("failed".into());
                record.extend(std::iter::repeat_n(String::new(), 8));
                record.push(msg.clone());
            }
        }
        w.write_record(&record)?;
    }
    w.flush().map_err(csv::Error::from)?;
    Ok(())
}

pub fn write_aggregate_csv<W: Write>(outcome: &BenchOutcome, writer: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(writer);
    w.write_record(AGGREGATE_HEADER)?;
    for row in &outcome.aggregate {
        let c = &row.cell;
        let mut record = vec![
            c.scenario.to_string(),
            c.n_vars.to_string(),
            format_f64(c.sigma_b),
            format_f64(c.sigma_ga),
            row.method.to_string(),
            row.runs.to_string(),
            row.failed.to_string(),
        ];
        record.extend([row.f1_mean, row.f1_std, row.tnr_mean, row.tnr_std].map(format_f64));
        w.write_record(&record)?;
    }
    w.flush().map_err(csv::Error::from)?;
    Ok(())
}

pub fn aggregate_json(outcome: &BenchOutcome) -> Result<String> {
    Ok(serde_json::to_string_pretty(&outcome.aggregate)?)
}
