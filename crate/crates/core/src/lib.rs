//! Causal discovery for multivariate time series from the evolution of their
//! power-law spectra.
//!
//! Each series is cut into overlapping windows; every window's DFT amplitude
//! spectrum is fitted with `log A(f) = a - lambda log f`, producing the
//! feature series `(a, lambda)`. Directed edges are then decided by Granger
//! tests in feature space. The crate also ships the raw-series Granger
//! baseline, a synthetic Ornstein-Uhlenbeck benchmark generator and the F1 /
//! TNR scores used to compare them.
//!
//! ```no_run
//! use placy_core::{discover, make_scenario, evaluate, DiscoveryConfig, ScenarioKind, ScenarioSpec};
//!
//! let (data, truth) = make_scenario(&ScenarioSpec::new(ScenarioKind::OuMult, 5, 5000, 7)).unwrap();
//! let graph = discover(&data, &DiscoveryConfig::default()).unwrap();
//! let scores = evaluate(&graph, &truth).unwrap();
//! println!("F1 {:.2}, TNR {:.2}", scores.f1, scores.tnr);
//! ```

pub mod dataset;
pub mod discovery;
pub mod error;
pub mod granger;
pub mod harness;
pub mod metrics;
pub mod numerics;
pub mod report;
pub mod spectral;
pub mod synth;

pub use dataset::{load_csv, read_csv, LoadedDataset, TimeSeriesSet};
pub use discovery::{discover, granger_baseline, run_method, CausalGraph, DiscoveryConfig, InterceptRole, Method};
pub use error::{Error, Result};
pub use granger::{build_lagged_design, wald_granger_test, VarSpec, WaldResult};
pub use harness::{run_bench, BenchOutcome, BenchmarkSpec};
pub use metrics::{evaluate, evaluate_adjacency, EvalReport};
pub use numerics::{chi2_sf, dft_amplitudes, solve_least_squares, LeastSquaresFit, Spectrum};
pub use report::GraphReport;
pub use spectral::{extract_features, fit_power_law, select_window_length, FeatureSeries, SpectralFit, WindowPlan, WindowSelection};
pub use synth::{generate_dag, generate_ou, inject_causality, make_scenario, GroundTruth, OuParams, ScenarioKind, ScenarioSpec};
