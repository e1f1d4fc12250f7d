use std::fs;
use std::path::{Path, PathBuf};

use placy_core::harness::{aggregate_json, write_aggregate_csv, write_raw_csv};
use placy_core::report::write_p_value_csv;
use placy_core::{
    evaluate, load_csv, make_scenario, run_bench, run_method, select_window_length, BenchmarkSpec, CausalGraph,
    DiscoveryConfig, GraphReport, GroundTruth, LoadedDataset, Method, ScenarioSpec, TimeSeriesSet, WindowPlan,
};
use serde_json::{json, Value};

use crate::error::{CliError, CliResult};
use crate::{BaselineArgs, BenchArgs, DiscoverArgs, GenArgs, InputArgs, SelectWindowArgs};

/// `dir/stem.ext` -> `dir/stem{suffix}`.
fn sibling(path: &Path, suffix: &str) -> PathBuf {
    let stem = path.file_stem().map_or_else(String::new, |s| s.to_string_lossy().into_owned());
    path.with_file_name(format!("{stem}{suffix}"))
}

fn write_file(path: &Path, bytes: impl AsRef<[u8]>) -> CliResult<()> {
    fs::write(path, bytes).map_err(|e| CliError::io(path, e))
}

fn read_file(path: &Path) -> CliResult<String> {
    fs::read_to_string(path).map_err(|e| CliError::io(path, e))
}

fn to_json(value: &impl serde::Serialize) -> CliResult<String> {
    serde_json::to_string_pretty(value).map_err(|e| CliError::config(e.to_string()))
}

fn load(path: &Path, no_interpolate: bool) -> CliResult<LoadedDataset> {
    Ok(load_csv(path, !no_interpolate)?)
}

fn load_truth(path: &Path) -> CliResult<GroundTruth> {
    serde_json::from_str(&read_file(path)?)
        .map_err(|e| CliError::config(format!("{}: not a ground-truth file: {e}", path.display())))
}

/// Runs `method` on the whole input or on each sample block and writes the reports.
fn analyse(input: &InputArgs, method: Method, config: &DiscoveryConfig, out: &Path) -> CliResult<()> {
    let loaded = load(&input.input, input.no_interpolate)?;
    let truth = input.truth.as_deref().map(load_truth).transpose()?;
    let missing: serde_json::Map<String, Value> = loaded
        .data
        .names()
        .iter()
        .zip(&loaded.missing)
        .map(|(n, &m)| (n.clone(), Value::from(m)))
        .collect();

    let describe = |graph: &CausalGraph, sampling: Value| -> CliResult<GraphReport> {
        let mut report = GraphReport::from_graph(graph);
        report.insert_metadata("input", input.input.display().to_string());
        report.insert_metadata("missing_values", missing.clone());
        report.insert_metadata("sampling", sampling);
        if let Some(truth) = &truth {
            let scores = evaluate(graph, truth)?;
            report.insert_metadata("evaluation", serde_json::to_value(scores).expect("scores serialise"));
        }
        Ok(report)
    };

    if !input.sample {
        let graph = run_method(method, &loaded.data, config)?;
        let report = describe(&graph, json!({ "mode": "full-series" }))?;
        write_graph(&graph, &report, out, "_pvalues.csv")?;
        print_summary(&report);
        return Ok(());
    }

    let len = input.sample_length;
    let blocks = loaded.data.blocks(len)?;
    if blocks.is_empty() {
        return Err(CliError::config(format!(
            "series of length {} holds no sample block of length {len}",
            loaded.data.len()
        )));
    }
    let mut reports = Vec::with_capacity(blocks.len());
    for (k, block) in blocks.iter().enumerate() {
        let graph = run_method(method, block, config).map_err(|e| {
            let mut err = CliError::from(e);
            err.message = format!("sample block {k}: {}", err.message);
            err
        })?;
        let sampling = json!({
            "mode": "disjoint-blocks",
            "block": k,
            "start": k * len,
            "length": len,
            "blocks": blocks.len(),
        });
        let report = describe(&graph, sampling)?;
        let mut csv = Vec::new();
        write_p_value_csv(&graph, &mut csv)?;
        write_file(&sibling(out, &format!("_block{k}_pvalues.csv")), csv)?;
        reports.push(report);
    }
    write_file(out, to_json(&reports)?)?;
    let scores: Vec<(f64, f64)> = reports
        .iter()
        .filter_map(|r| r.metadata.get("evaluation"))
        .map(|e| (e["f1"].as_f64().unwrap_or(f64::NAN), e["tnr"].as_f64().unwrap_or(f64::NAN)))
        .collect();
    println!("{} sample blocks of length {len}", reports.len());
    if !scores.is_empty() {
        let n = scores.len() as f64;
        let (f1, tnr) = scores.iter().fold((0.0, 0.0), |(a, b), (f, t)| (a + f, b + t));
        println!("mean F1 {:.4}, mean TNR {:.4}", f1 / n, tnr / n);
    }
    Ok(())
}

fn write_graph(graph: &CausalGraph, report: &GraphReport, out: &Path, suffix: &str) -> CliResult<()> {
    write_file(out, report.to_json()?)?;
    let mut csv = Vec::new();
    write_p_value_csv(graph, &mut csv)?;
    write_file(&sibling(out, suffix), csv)
}

fn print_summary(report: &GraphReport) {
    if let Some(w) = report.window {
        println!("window {w}, stride {}", report.stride.unwrap_or(1));
    }
    for (i, row) in report.adjacency.iter().enumerate() {
        for (j, &edge) in row.iter().enumerate() {
            if edge {
                let p = report.p_values[i][j].unwrap_or(f64::NAN);
                println!("{} -> {} (p = {p:.3e})", report.names[i], report.names[j]);
            }
        }
    }
    if let Some(e) = report.metadata.get("evaluation") {
        println!("F1 {}, TNR {}", e["f1"], e["tnr"]);
    }
}

pub fn discover(args: DiscoverArgs) -> CliResult<()> {
    let config = DiscoveryConfig {
        plan: WindowPlan::new(args.window.window, args.window.stride)?,
        max_lag: args.test.max_lag,
        alpha: args.test.alpha,
        auto_window: args.auto_window,
        window_candidates: args.window_candidates,
        intercept_role: args.intercept_role,
    };
    config.validate()?;
    analyse(&args.input, Method::Placy, &config, &args.out)
}

pub fn baseline(args: BaselineArgs) -> CliResult<()> {
    let config = DiscoveryConfig {
        max_lag: args.test.max_lag,
        alpha: args.test.alpha,
        ..DiscoveryConfig::default()
    };
    config.validate()?;
    analyse(&args.input, Method::Granger, &config, &args.out)
}

pub fn generate(args: GenArgs) -> CliResult<()> {
    let mut spec = ScenarioSpec::new(args.scenario, args.n_vars, args.length, args.seed);
    spec.lag = args.lag_tau;
    if let Some(c) = args.causal_strength {
        spec.causal_strength = c;
    }
    if let Some(p) = args.edge_prob {
        spec.edge_prob = p;
    }
    if let Some(v) = args.sigma_b {
        spec.ou.sigma_b = v;
    }
    if let Some(v) = args.sigma_ga {
        spec.ou.sigma_ga = v;
    }
    if let Some(v) = args.sigma_gm {
        spec.ou.sigma_gm = v;
    }
    spec.ou = spec.effective_params()?;
    let (data, truth) = make_scenario(&spec)?;
    data.save_csv(&args.out)?;

    let document = json!({
        "names": data.names(),
        "adjacency": truth.adjacency,
        "causal_strength": truth.causal_strength,
        "lag": truth.lag,
        "scenario": spec,
    });
    write_file(&sibling(&args.out, "_truth.json"), to_json(&document)?)?;
    println!(
        "{} variables x {} steps, {} injected edges",
        data.n_vars(),
        data.len(),
        truth.edges().len()
    );
    Ok(())
}

fn bench_spec(args: &BenchArgs) -> CliResult<BenchmarkSpec> {
    let mut spec = match &args.spec {
        Some(path) => serde_json::from_str(&read_file(path)?)
            .map_err(|e| CliError::config(format!("{}: invalid benchmark spec: {e}", path.display())))?,
        None => BenchmarkSpec::default(),
    };
    macro_rules! set {
        ($field:ident) => {
            if let Some(v) = &args.$field {
                spec.$field = v.clone();
            }
        };
    }
    set!(n_vars);
    set!(sigma_b);
    set!(sigma_ga);
    set!(sigma_gm);
    set!(causal_strength);
    set!(length);
    set!(edge_prob);
    set!(methods);
    if let Some(v) = &args.scenario {
        spec.scenarios = v.clone();
    }
    if let Some(v) = args.lag_tau {
        spec.lag = v;
    }
    if let Some(v) = &args.seeds {
        spec.seeds = v.0.clone();
    }
    let d = &mut spec.discovery;
    d.plan = WindowPlan::new(args.window.unwrap_or(d.plan.length), args.stride.unwrap_or(d.plan.stride))?;
    if let Some(v) = args.max_lag {
        d.max_lag = v;
    }
    if let Some(v) = args.alpha {
        d.alpha = v;
    }
    d.auto_window |= args.auto_window;
    spec.validate()?;
    Ok(spec)
}

pub fn bench(args: BenchArgs, threads: usize) -> CliResult<()> {
    let spec = bench_spec(&args)?;
    fs::create_dir_all(&args.out).map_err(|e| CliError::io(&args.out, e))?;
    let outcome = run_bench(&spec, threads)?;

    let mut raw = Vec::new();
    write_raw_csv(&spec, &outcome, &mut raw)?;
    write_file(&args.out.join("raw.csv"), raw)?;
    let mut agg = Vec::new();
    write_aggregate_csv(&outcome, &mut agg)?;
    write_file(&args.out.join("aggregate.csv"), agg)?;
    write_file(&args.out.join("aggregate.json"), aggregate_json(&outcome)?)?;
    write_file(&args.out.join("spec.json"), to_json(&spec)?)?;

    for row in &outcome.aggregate {
        let c = &row.cell;
        println!(
            "{} N={} sigma_b={} sigma_ga={} {}: F1 {:.3} +- {:.3}, TNR {:.3} +- {:.3} ({} runs, {} failed)",
            c.scenario,
            c.n_vars,
            c.sigma_b,
            c.sigma_ga,
            row.method,
            row.f1_mean,
            row.f1_std,
            row.tnr_mean,
            row.tnr_std,
            row.runs,
            row.failed
        );
    }
    Ok(())
}

pub fn select_window(args: SelectWindowArgs) -> CliResult<()> {
    let loaded = load(&args.input, args.no_interpolate)?;
    let data: &TimeSeriesSet = &loaded.data;
    let mut entries = Vec::with_capacity(data.n_vars());
    println!("variable\tlength\tsignificant");
    for (name, column) in data.names().iter().zip(data.columns()) {
        let sel = select_window_length(column, &args.candidates, args.alpha).map_err(|e| {
            let mut err = CliError::from(e);
            err.message = format!("variable `{name}`: {}", err.message);
            err
        })?;
        println!("{name}\t{}\t{}", sel.length, sel.significant);
        entries.push(json!({
            "variable": name,
            "length": sel.length,
            "significant": sel.significant,
            "median_p_values": sel.median_p_values,
        }));
    }
    if let Some(out) = &args.out {
        let document = json!({
            "alpha": args.alpha,
            "candidates": args.candidates,
            "selections": entries,
        });
        write_file(out, to_json(&document)?)?;
    }
    Ok(())
}
