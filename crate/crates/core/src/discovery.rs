//! Causal graph discovery on spectral features, plus the raw-series Granger
//! baseline it is compared against.
//!
//! For every ordered pair `i -> j` the spectral method asks whether the lags
//! of `(lambda_i, a_i)` help predict `lambda_j` beyond its own lags. The
//! intercept series of the target is never used: it adds false positives on
//! non-stationary data without improving detection elsewhere.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::dataset::TimeSeriesSet;
use crate::error::{Error, Result};
use crate::granger::{wald_granger_test, VarSpec, DEFAULT_MAX_LAG};
use crate::spectral::{extract_features, select_window_length, FeatureSeries, WindowPlan, WindowSelection};

pub const DEFAULT_ALPHA: f64 = 0.05;
pub const DEFAULT_WINDOW_CANDIDATES: [usize; 4] = [50, 100, 150, 200];

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Method {
    Placy,
    Granger,
}

impl Method {
    pub fn as_str(&self) -> &'static str {
        match self {
            Method::Placy => "placy",
            Method::Granger => "granger",
        }
    }
}

impl std::fmt::Display for Method {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.as_str())
    }
}

impl std::str::FromStr for Method {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "placy" => Ok(Method::Placy),
            "granger" => Ok(Method::Granger),
            other => Err(Error::InvalidInput(format!("unknown method `{other}`"))),
        }
    }
}

/// Which feature series enter the causing block of each pairwise test.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum InterceptRole {
    /// `a_i` is tested jointly with `lambda_i`.
    #[default]
    Causing,
    /// `a_i` is a lagged regressor whose coefficients are not tested.
    Covariate,
    /// Only `lambda_i` is used.
    Excluded,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct DiscoveryConfig {
    pub plan: WindowPlan,
    pub max_lag: usize,
    pub alpha: f64,
    pub auto_window: bool,
    pub window_candidates: Vec<usize>,
    pub intercept_role: InterceptRole,
}

impl Default for DiscoveryConfig {
    fn default() -> Self {
        Self {
            plan: WindowPlan::default(),
            max_lag: DEFAULT_MAX_LAG,
            alpha: DEFAULT_ALPHA,
            auto_window: false,
            window_candidates: DEFAULT_WINDOW_CANDIDATES.to_vec(),
            intercept_role: InterceptRole::Causing,
        }
    }
}

impl DiscoveryConfig {
    pub fn validate(&self) -> Result<()> {
        check_alpha(self.alpha)?;
        if self.max_lag == 0 {
            return Err(Error::InvalidInput("max_lag must be at least 1".into()));
        }
        WindowPlan::new(self.plan.length, self.plan.stride)?;
        Ok(())
    }

    /// Parameters of each feature-domain regression.
    fn n_params(&self) -> usize {
        let blocks = match self.intercept_role {
            InterceptRole::Excluded => 2,
            _ => 3,
        };
        1 + self.max_lag * blocks
    }

    /// Shortest raw series that leaves enough feature points for the VAR fit.
    pub fn min_series_len(&self, plan: &WindowPlan) -> usize {
        let features = self.max_lag + self.n_params() + 1;
        plan.length + (features - 1) * plan.stride
    }
}

fn check_alpha(alpha: f64) -> Result<()> {
    if alpha > 0.0 && alpha < 1.0 {
        Ok(())
    } else {
        Err(Error::InvalidInput(format!("alpha must lie in (0, 1), got {alpha}")))
    }
}

/// Directed graph; entry `(i, j)` is the edge `i -> j`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CausalGraph {
    pub names: Vec<String>,
    pub alpha: f64,
    pub adjacency: Vec<Vec<bool>>,
    /// Off-diagonal test p-values; the diagonal holds NaN.
    pub p_values: Vec<Vec<f64>>,
    pub method: Method,
    pub max_lag: usize,
    /// Window plan of the feature extraction, absent for the raw baseline.
    pub plan: Option<WindowPlan>,
    /// Per-variable window selections when the window length was chosen from data.
    pub window_selections: Vec<WindowSelection>,
}

impl CausalGraph {
    /// Thresholds `p_values` at `alpha`; the diagonal is always edge-free.
    pub fn from_p_values(
        names: Vec<String>,
        mut p_values: Vec<Vec<f64>>,
        alpha: f64,
        method: Method,
        max_lag: usize,
    ) -> Result<Self> {
        check_alpha(alpha)?;
        let d = names.len();
        if p_values.len() != d || p_values.iter().any(|r| r.len() != d) {
            return Err(Error::DimensionMismatch {
                expected: d,
                found: p_values.len(),
            });
        }
        for (i, row) in p_values.iter_mut().enumerate() {
            row[i] = f64::NAN;
        }
        let adjacency = p_values
            .iter()
            .enumerate()
            .map(|(i, row)| row.iter().enumerate().map(|(j, &p)| i != j && p < alpha).collect())
            .collect();
        Ok(Self {
            names,
            alpha,
            adjacency,
            p_values,
            method,
            max_lag,
            plan: None,
            window_selections: Vec::new(),
        })
    }

    pub fn n_vars(&self) -> usize {
        self.names.len()
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

    pub fn edge_count(&self) -> usize {
        self.adjacency.iter().flatten().filter(|&&e| e).count()
    }
}

fn ordered_pairs(d: usize) -> Vec<(usize, usize)> {
    (0..d)
        .flat_map(|i| (0..d).filter(move |&j| j != i).map(move |j| (i, j)))
        .collect()
}

fn assemble(d: usize, tests: Vec<((usize, usize), f64)>) -> Vec<Vec<f64>> {
    let mut p = vec![vec![f64::NAN; d]; d];
    for ((i, j), v) in tests {
        p[i][j] = v;
    }
    p
}

fn feature_test(config: &DiscoveryConfig, cause: &FeatureSeries, effect: &FeatureSeries) -> Result<f64> {
    // Block layout: 0 = lambda_j (caused), 1 = lambda_i, 2 = a_i.
    let block: [&[f64]; 3] = [&effect.lambda_series, &cause.lambda_series, &cause.a_series];
    let spec = match config.intercept_role {
        InterceptRole::Causing => VarSpec::new(config.max_lag, 0, vec![1, 2], vec![])?,
        InterceptRole::Covariate => VarSpec::new(config.max_lag, 0, vec![1], vec![2])?,
        InterceptRole::Excluded => VarSpec::new(config.max_lag, 0, vec![1], vec![])?,
    };
    Ok(wald_granger_test(&spec, &block)?.p_value)
}

/// Runs the spectral-feature discovery over every ordered pair of variables.
pub fn discover(data: &TimeSeriesSet, config: &DiscoveryConfig) -> Result<CausalGraph> {
    config.validate()?;
    let d = data.n_vars();
    if d == 0 {
        return Err(Error::InvalidInput("dataset has no variables".into()));
    }
    let names = data.names().to_vec();
    if d == 1 {
        let mut g = CausalGraph::from_p_values(names, vec![vec![f64::NAN]], config.alpha, Method::Placy, config.max_lag)?;
        g.plan = Some(config.plan);
        return Ok(g);
    }

    let mut plan = config.plan;
    let mut selections = Vec::new();
    if config.auto_window {
        selections = data
            .columns()
            .par_iter()
            .zip(data.names())
            .map(|(col, name)| {
                select_window_length(col, &config.window_candidates, config.alpha).map_err(|e| e.in_variable(name))
            })
            .collect::<Result<Vec<_>>>()?;
        let length = selections.iter().map(|s| s.length).max().unwrap_or(plan.length);
        plan = WindowPlan::new(length, plan.stride.min(length - 1))?;
    }

    let required = config.min_series_len(&plan);
    if data.len() < required {
        return Err(Error::SeriesTooShort {
            len: data.len(),
            required,
        });
    }

    let features = data
        .columns()
        .par_iter()
        .zip(data.names())
        .map(|(col, name)| extract_features(col, &plan).map_err(|e| e.in_variable(name)))
        .collect::<Result<Vec<_>>>()?;

    let tests = ordered_pairs(d)
        .into_par_iter()
        .map(|(i, j)| {
            feature_test(config, &features[i], &features[j])
                .map(|p| ((i, j), p))
                .map_err(|e| e.in_variable(&format!("{} -> {}", names[i], names[j])))
        })
        .collect::<Result<Vec<_>>>()?;

    let mut graph = CausalGraph::from_p_values(names, assemble(d, tests), config.alpha, Method::Placy, config.max_lag)?;
    graph.plan = Some(plan);
    graph.window_selections = selections;
    Ok(graph)
}

/// Raw-series Granger causality: `x_i -> x_j` is tested conditionally on the
/// lags of every other variable.
pub fn granger_baseline(data: &TimeSeriesSet, max_lag: usize, alpha: f64) -> Result<CausalGraph> {
    check_alpha(alpha)?;
    let d = data.n_vars();
    if d == 0 {
        return Err(Error::InvalidInput("dataset has no variables".into()));
    }
    let names = data.names().to_vec();
    if d == 1 {
        return CausalGraph::from_p_values(names, vec![vec![f64::NAN]], alpha, Method::Granger, max_lag);
    }
    let block: Vec<&[f64]> = data.columns().iter().map(Vec::as_slice).collect();
    let tests = ordered_pairs(d)
        .into_par_iter()
        .map(|(i, j)| {
            let covariates = (0..d).filter(|&k| k != i && k != j).collect();
            let spec = VarSpec::new(max_lag, j, vec![i], covariates)?;
            wald_granger_test(&spec, &block)
                .map(|r| ((i, j), r.p_value))
                .map_err(|e| e.in_variable(&format!("{} -> {}", names[i], names[j])))
        })
        .collect::<Result<Vec<_>>>()?;
    CausalGraph::from_p_values(names, assemble(d, tests), alpha, Method::Granger, max_lag)
}

/// Dispatches to [`discover`] or [`granger_baseline`].
pub fn run_method(method: Method, data: &TimeSeriesSet, config: &DiscoveryConfig) -> Result<CausalGraph> {
    match method {
        Method::Placy => discover(data, config),
        Method::Granger => granger_baseline(data, config.max_lag, config.alpha),
    }
}
