//! Synthetic benchmarks: generalised Ornstein-Uhlenbeck paths, random DAG
//! ground truth and lagged causal injection.
//!
//! Every scenario is a pure function of its seed. Randomness comes from
//! ChaCha20 (`rand_chacha::ChaCha20Rng`) seeded with `seed_from_u64(seed)`;
//! each variable's path and the DAG draw from their own ChaCha stream
//! (`set_stream`), so adding variables never perturbs existing streams.

use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha20Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use crate::dataset::TimeSeriesSet;
use crate::error::{Error, Result};

pub const DEFAULT_EDGE_PROB: f64 = 0.3;
pub const DEFAULT_LAG: usize = 5;
pub const DEFAULT_CAUSAL_STRENGTH: f64 = 0.5;
/// Multiplicative volatility used by the `*-mult` scenarios unless overridden.
pub const DEFAULT_SIGMA_GM: f64 = 1.0;

const STREAM_PATH: u64 = 1 << 32;
const STREAM_DAG: u64 = 2 << 32;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct OuParams {
    pub dt: f64,
    /// Mean-reversion timescale.
    pub tau_c: f64,
    /// Long-term mean.
    pub mu: f64,
    /// Volatility of the Brownian-path noise.
    pub sigma_b: f64,
    /// Additive Gaussian volatility.
    pub sigma_ga: f64,
    /// Multiplicative Gaussian volatility.
    pub sigma_gm: f64,
    pub x0: f64,
}

impl Default for OuParams {
    fn default() -> Self {
        Self {
            dt: 0.01,
            tau_c: 0.5,
            mu: 1.0,
            sigma_b: 0.0,
            sigma_ga: 1.0,
            sigma_gm: 0.0,
            x0: 1.0,
        }
    }
}

impl OuParams {
    pub fn validate(&self) -> Result<()> {
        let finite = [self.dt, self.tau_c, self.mu, self.sigma_b, self.sigma_ga, self.sigma_gm, self.x0]
            .iter()
            .all(|v| v.is_finite());
        if !finite {
            return Err(Error::InvalidInput("OU parameters must be finite".into()));
        }
        if self.dt <= 0.0 || self.tau_c <= 0.0 {
            return Err(Error::InvalidInput("dt and tau_c must be positive".into()));
        }
        if self.sigma_b < 0.0 || self.sigma_ga < 0.0 || self.sigma_gm < 0.0 {
            return Err(Error::InvalidInput("volatilities must be non-negative".into()));
        }
        Ok(())
    }
}

/// Euler-Maruyama path of the generalised OU process, starting at `x0`:
///
/// ```text
/// x(t+dt) = x(t) + dt/tau_c (mu - x(t))
///         + (sigma_b B(t) + sigma_ga e_a(t) + sigma_gm e_m(t) x(t)) sqrt(dt)
/// ```
///
/// `B` is a Brownian path with `B(0) = 0` and `N(0, dt)` increments; `e_a`,
/// `e_m` are i.i.d. standard normal. Three normals are drawn per step in the
/// order (Brownian increment, additive, multiplicative) regardless of which
/// volatilities are zero.
pub fn generate_ou<R: Rng + ?Sized>(params: &OuParams, length: usize, rng: &mut R) -> Result<Vec<f64>> {
    params.validate()?;
    if length == 0 {
        return Err(Error::InvalidInput("path length must be at least 1".into()));
    }
    let sqrt_dt = params.dt.sqrt();
    let rate = params.dt / params.tau_c;
    let mut path = Vec::with_capacity(length);
    let mut x = params.x0;
    let mut brownian = 0.0;
    path.push(x);
    for _ in 1..length {
        let db: f64 = rng.sample(StandardNormal);
        let ea: f64 = rng.sample(StandardNormal);
        let em: f64 = rng.sample(StandardNormal);
        let noise = params.sigma_b * brownian + params.sigma_ga * ea + params.sigma_gm * em * x;
        x += rate * (params.mu - x) + noise * sqrt_dt;
        brownian += db * sqrt_dt;
        path.push(x);
    }
    Ok(path)
}

/// Strictly upper-triangular random adjacency; entry `(i, j)`, `i < j`, is set
/// independently with probability `edge_prob`.
///
/// Entries are drawn column by column (`j = 1..n`, then `i = 0..j`), so the
/// DAG over the first `n` variables does not depend on how many follow.
pub fn generate_dag<R: Rng + ?Sized>(n: usize, edge_prob: f64, rng: &mut R) -> Result<Vec<Vec<bool>>> {
    if n == 0 {
        return Err(Error::InvalidInput("DAG needs at least one variable".into()));
    }
    if !(0.0..=1.0).contains(&edge_prob) {
        return Err(Error::InvalidInput(format!("edge probability {edge_prob} outside [0, 1]")));
    }
    let mut m = vec![vec![false; n]; n];
    for j in 1..n {
        for row in m.iter_mut().take(j) {
            row[j] = rng.random::<f64>() < edge_prob;
        }
    }
    Ok(m)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GroundTruth {
    /// `adjacency[i][j]` is the edge `i -> j`.
    pub adjacency: Vec<Vec<bool>>,
    pub causal_strength: f64,
    pub lag: usize,
}

impl GroundTruth {
    pub fn n_vars(&self) -> usize {
        self.adjacency.len()
    }

    pub fn edges(&self) -> Vec<(usize, usize)> {
        let mut out = Vec::new();
        for (i, row) in self.adjacency.iter().enumerate() {
            for (j, &e) in row.iter().enumerate() {
                if e {
                    out.push((i, j));
                }
            }
        }
        out
    }

    pub fn is_strictly_upper_triangular(&self) -> bool {
        self.adjacency
            .iter()
            .enumerate()
            .all(|(i, row)| row.len() == self.adjacency.len() && row[..=i].iter().all(|&e| !e))
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Injection {
    pub columns: Vec<Vec<f64>>,
    /// Modified columns whose pre-injection range had zero width and were
    /// therefore left unrescaled.
    pub unscaled: Vec<usize>,
}

/// Adds `C * x_i(t - lag)` to `x_j(t)` for every edge `i -> j` in `edges`,
/// then maps each modified column back onto its pre-injection `[min, max]`.
///
/// Cause values are read from the unmodified input, and each target
/// accumulates its contributions in ascending cause order, so the result does
/// not depend on the order of `edges`.
pub fn inject_edges(columns: &[Vec<f64>], edges: &[(usize, usize)], strength: f64, lag: usize) -> Result<Injection> {
    let d = columns.len();
    let len = columns.first().map_or(0, Vec::len);
    if columns.iter().any(|c| c.len() != len) {
        return Err(Error::InvalidInput("columns have different lengths".into()));
    }
    if let Some(&(i, j)) = edges.iter().find(|&&(i, j)| i >= d || j >= d || i == j) {
        return Err(Error::InvalidInput(format!("invalid edge {i} -> {j}")));
    }
    let mut out = columns.to_vec();
    if strength == 0.0 || edges.is_empty() {
        return Ok(Injection {
            columns: out,
            unscaled: Vec::new(),
        });
    }
    if len <= lag {
        return Err(Error::SeriesTooShort {
            len,
            required: lag + 1,
        });
    }

    let mut sorted = edges.to_vec();
    sorted.sort_by_key(|&(i, j)| (j, i));
    sorted.dedup();

    let mut unscaled = Vec::new();
    let mut start = 0;
    while start < sorted.len() {
        let j = sorted[start].1;
        let end = start + sorted[start..].iter().take_while(|e| e.1 == j).count();
        let target = &mut out[j];
        for &(i, _) in &sorted[start..end] {
            let cause = &columns[i];
            for t in lag..len {
                target[t] += strength * cause[t - lag];
            }
        }
        if !rescale_to(target, &columns[j]) {
            unscaled.push(j);
        }
        start = end;
    }
    Ok(Injection {
        columns: out,
        unscaled,
    })
}

fn min_max(v: &[f64]) -> (f64, f64) {
    v.iter()
        .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), &x| (lo.min(x), hi.max(x)))
}

/// Affine map of `values` onto the range of `reference`; `false` if either range is empty.
fn rescale_to(values: &mut [f64], reference: &[f64]) -> bool {
    let (lo, hi) = min_max(reference);
    let (cur_lo, cur_hi) = min_max(values);
    if !(hi > lo) || !(cur_hi > cur_lo) {
        return false;
    }
    let width = cur_hi - cur_lo;
    for v in values.iter_mut() {
        let t = (*v - cur_lo) / width;
        *v = lo * (1.0 - t) + hi * t;
    }
    true
}

/// Applies the ground-truth DAG to `columns` (one column per variable).
pub fn inject_causality(columns: &[Vec<f64>], truth: &GroundTruth) -> Result<Injection> {
    if truth.n_vars() != columns.len() {
        return Err(Error::DimensionMismatch {
            expected: columns.len(),
            found: truth.n_vars(),
        });
    }
    inject_edges(columns, &truth.edges(), truth.causal_strength, truth.lag)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum ScenarioKind {
    /// Equilibrium start, no multiplicative noise.
    #[serde(rename = "ou")]
    Ou,
    /// Equilibrium start with multiplicative noise.
    #[serde(rename = "ou-mult")]
    OuMult,
    /// Start far from equilibrium (x0 = 100), no multiplicative noise.
    #[serde(rename = "ouhat")]
    OuHat,
    /// Start far from equilibrium with multiplicative noise.
    #[serde(rename = "ouhat-mult")]
    OuHatMult,
}

impl ScenarioKind {
    pub const ALL: [ScenarioKind; 4] = [ScenarioKind::Ou, ScenarioKind::OuMult, ScenarioKind::OuHat, ScenarioKind::OuHatMult];

    pub fn as_str(&self) -> &'static str {
        match self {
            ScenarioKind::Ou => "ou",
            ScenarioKind::OuMult => "ou-mult",
            ScenarioKind::OuHat => "ouhat",
            ScenarioKind::OuHatMult => "ouhat-mult",
        }
    }

    pub fn multiplicative(&self) -> bool {
        matches!(self, ScenarioKind::OuMult | ScenarioKind::OuHatMult)
    }

    pub fn initial_value(&self) -> f64 {
        match self {
            ScenarioKind::Ou | ScenarioKind::OuMult => 1.0,
            ScenarioKind::OuHat | ScenarioKind::OuHatMult => 100.0,
        }
    }
}

impl std::fmt::Display for ScenarioKind {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.as_str())
    }
}

impl std::str::FromStr for ScenarioKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        ScenarioKind::ALL
            .into_iter()
            .find(|k| k.as_str() == s)
            .ok_or_else(|| Error::InvalidInput(format!("unknown scenario `{s}`")))
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScenarioSpec {
    pub kind: ScenarioKind,
    pub n_vars: usize,
    pub length: usize,
    pub ou: OuParams,
    pub edge_prob: f64,
    pub causal_strength: f64,
    pub lag: usize,
    pub seed: u64,
}

impl ScenarioSpec {
    /// Scenario with the standard OU constants, `sigma_ga = 1`, `sigma_b = 0`
    /// and the kind's initial value and multiplicative volatility.
    pub fn new(kind: ScenarioKind, n_vars: usize, length: usize, seed: u64) -> Self {
        let ou = OuParams {
            x0: kind.initial_value(),
            sigma_gm: if kind.multiplicative() { DEFAULT_SIGMA_GM } else { 0.0 },
            ..OuParams::default()
        };
        Self {
            kind,
            n_vars,
            length,
            ou,
            edge_prob: DEFAULT_EDGE_PROB,
            causal_strength: DEFAULT_CAUSAL_STRENGTH,
            lag: DEFAULT_LAG,
            seed,
        }
    }

    /// OU parameters with the kind's constraints applied.
    pub fn effective_params(&self) -> Result<OuParams> {
        let mut p = self.ou;
        p.x0 = self.kind.initial_value();
        if self.kind.multiplicative() {
            if !(p.sigma_gm > 0.0) {
                return Err(Error::InvalidInput(format!(
                    "scenario `{}` requires sigma_gm > 0",
                    self.kind
                )));
            }
        } else {
            p.sigma_gm = 0.0;
        }
        p.validate()?;
        Ok(p)
    }
}

fn stream(seed: u64, id: u64) -> ChaCha20Rng {
    let mut rng = ChaCha20Rng::seed_from_u64(seed);
    rng.set_stream(id);
    rng
}

/// Raw OU paths before any causal injection.
pub fn raw_paths(spec: &ScenarioSpec) -> Result<Vec<Vec<f64>>> {
    let params = spec.effective_params()?;
    (0..spec.n_vars)
        .map(|i| generate_ou(&params, spec.length, &mut stream(spec.seed, STREAM_PATH | i as u64)))
        .collect()
}

/// Generates a full benchmark instance: independent OU paths, a random DAG and
/// the injected causal links.
pub fn make_scenario(spec: &ScenarioSpec) -> Result<(TimeSeriesSet, GroundTruth)> {
    if spec.n_vars == 0 {
        return Err(Error::InvalidInput("scenario needs at least one variable".into()));
    }
    let paths = raw_paths(spec)?;
    let truth = GroundTruth {
        adjacency: generate_dag(spec.n_vars, spec.edge_prob, &mut stream(spec.seed, STREAM_DAG))?,
        causal_strength: spec.causal_strength,
        lag: spec.lag,
    };
    let injected = inject_causality(&paths, &truth)?;
    Ok((TimeSeriesSet::from_columns(injected.columns)?, truth))
}
