//! Shared fixtures for the benchmarks in `benches/`.

use placy_core::{make_scenario, ScenarioKind, ScenarioSpec, TimeSeriesSet};

/// Deterministic synthetic dataset with injected causal links.
pub fn fixture(kind: ScenarioKind, n_vars: usize, length: usize) -> TimeSeriesSet {
    make_scenario(&ScenarioSpec::new(kind, n_vars, length, 7))
        .expect("benchmark scenario is valid")
        .0
}
