use std::path::Path;
use std::process::{Command, Output};

use placy_core::{load_csv, make_scenario, ScenarioKind, ScenarioSpec};
use serde_json::Value;

fn placy(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_placy"))
        .args(args)
        .env_remove("PLACY_THREADS")
        .output()
        .expect("binary runs")
}

fn arg(p: &Path) -> &str {
    p.to_str().unwrap()
}

fn read_json(p: &Path) -> Value {
    serde_json::from_str(&std::fs::read_to_string(p).unwrap()).unwrap()
}

fn generate(dir: &Path, extra: &[&str]) -> std::path::PathBuf {
    let data = dir.join("data.csv");
    let mut args = vec!["gen", "--out", arg(&data)];
    args.extend_from_slice(extra);
    let out = placy(&args);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    data
}

#[test]
fn missing_input_exits_with_code_2_and_names_the_path() {
    let dir = tempfile::tempdir().unwrap();
    let missing = dir.path().join("absent.csv");
    let out = placy(&["discover", "--input", arg(&missing), "--out", arg(&dir.path().join("g.json"))]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("absent.csv"));
}

#[test]
fn discover_writes_graph_and_p_value_table() {
    let dir = tempfile::tempdir().unwrap();
    let data = generate(dir.path(), &["--scenario", "ou", "--n-vars", "3", "--length", "800", "--seed", "4"]);
    let graph = dir.path().join("graph.json");
    let out = placy(&[
        "discover", "--input", arg(&data), "--window", "50", "--stride", "1", "--max-lag", "10", "--alpha", "0.05",
        "--out", arg(&graph),
    ]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let json = read_json(&graph);
    for key in ["names", "alpha", "window", "stride", "max_lag", "adjacency", "p_values", "metadata"] {
        assert!(json.get(key).is_some(), "missing {key}");
    }
    assert_eq!(json["window"], 50);
    assert_eq!(json["metadata"]["method"], "placy");
    let table = std::fs::read_to_string(dir.path().join("graph_pvalues.csv")).unwrap();
    let lines: Vec<&str> = table.lines().collect();
    assert_eq!(lines.len(), 4);
    assert_eq!(lines[0], ",x0,x1,x2");
    assert!(lines[1].starts_with("x0,,"));
}

#[test]
fn auto_window_is_recorded() {
    let dir = tempfile::tempdir().unwrap();
    let data = generate(dir.path(), &["--n-vars", "2", "--length", "1200", "--seed", "1"]);
    let graph = dir.path().join("g.json");
    let out = placy(&["discover", "--input", arg(&data), "--auto-window", "--out", arg(&graph)]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let json = read_json(&graph);
    assert_eq!(json["metadata"]["auto_window"], true);
    let selections = json["metadata"]["window_selections"].as_array().unwrap();
    assert_eq!(selections.len(), 2);
    let chosen = selections.iter().map(|s| s["length"].as_u64().unwrap()).max().unwrap();
    assert_eq!(json["window"].as_u64().unwrap(), chosen);
}

#[test]
fn baseline_has_no_window_and_scores_against_truth() {
    let dir = tempfile::tempdir().unwrap();
    let data = generate(dir.path(), &["--n-vars", "3", "--length", "600", "--seed", "2"]);
    let graph = dir.path().join("b.json");
    let truth = dir.path().join("data_truth.json");
    let out = placy(&["baseline", "--input", arg(&data), "--truth", arg(&truth), "--out", arg(&graph)]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let json = read_json(&graph);
    assert!(json["window"].is_null());
    assert!(json["stride"].is_null());
    assert_eq!(json["metadata"]["method"], "granger");
    let eval = &json["metadata"]["evaluation"];
    assert!(eval["f1"].is_number() && eval["tnr"].is_number());
}

#[test]
fn sample_mode_uses_disjoint_blocks() {
    let dir = tempfile::tempdir().unwrap();
    let data = generate(dir.path(), &["--n-vars", "2", "--length", "1100", "--seed", "6"]);
    let graph = dir.path().join("s.json");
    let out = placy(&["discover", "--input", arg(&data), "--sample", "--out", arg(&graph)]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let reports = read_json(&graph);
    let reports = reports.as_array().unwrap();
    assert_eq!(reports.len(), 2);
    assert_eq!(reports[1]["metadata"]["sampling"]["mode"], "disjoint-blocks");
    assert_eq!(reports[1]["metadata"]["sampling"]["start"], 500);
    assert!(dir.path().join("s_block1_pvalues.csv").exists());
}

#[test]
fn generated_data_round_trips() {
    let dir = tempfile::tempdir().unwrap();
    let data = generate(
        dir.path(),
        &["--scenario", "ouhat-mult", "--n-vars", "4", "--length", "700", "--seed", "9", "--sigma-b", "0.5"],
    );
    let loaded = load_csv(&data, false).unwrap();
    let mut spec = ScenarioSpec::new(ScenarioKind::OuHatMult, 4, 700, 9);
    spec.ou.sigma_b = 0.5;
    let (expected, truth) = make_scenario(&spec).unwrap();
    for (a, b) in loaded.data.columns().iter().zip(expected.columns()) {
        for (x, y) in a.iter().zip(b) {
            assert!((x - y).abs() <= 1e-12 * y.abs().max(1.0));
        }
    }
    let truth_json = read_json(&dir.path().join("data_truth.json"));
    let adjacency: Vec<Vec<bool>> = serde_json::from_value(truth_json["adjacency"].clone()).unwrap();
    assert_eq!(adjacency, truth.adjacency);
    assert_eq!(truth_json["scenario"]["kind"], "ouhat-mult");
}

#[test]
fn bench_output_is_identical_across_reruns_and_thread_counts() {
    let dir = tempfile::tempdir().unwrap();
    let run = |name: &str, threads: &str| {
        let out_dir = dir.path().join(name);
        let out = placy(&[
            "bench", "--scenario", "ou-mult,ouhat", "--n-vars", "3", "--sigma-b", "0,0.5", "--sigma-ga", "1",
            "--length", "500", "--seeds", "0..3", "--max-lag", "3", "--threads", threads, "--out", arg(&out_dir),
        ]);
        assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
        out_dir
    };
    let first = run("a", "1");
    let second = run("b", "4");
    let third = run("c", "1");
    let raw = std::fs::read(first.join("raw.csv")).unwrap();
    assert_eq!(raw, std::fs::read(second.join("raw.csv")).unwrap());
    assert_eq!(raw, std::fs::read(third.join("raw.csv")).unwrap());
    // Header plus 2 scenarios x 2 sigma_b x 3 seeds x 2 methods.
    assert_eq!(String::from_utf8(raw).unwrap().lines().count(), 1 + 24);
    let agg = read_json(&first.join("aggregate.json"));
    assert_eq!(agg.as_array().unwrap().len(), 8);
    assert!(first.join("aggregate.csv").exists());
}

#[test]
fn bench_reads_spec_file_and_flags_override_it() {
    let dir = tempfile::tempdir().unwrap();
    let spec = dir.path().join("spec.json");
    std::fs::write(
        &spec,
        r#"{"scenarios":["ou"],"sigma_b":[0.1],"sigma_ga":[0.5],"n_vars":[2],"length":400,"seeds":[1,2],"methods":["granger"]}"#,
    )
    .unwrap();
    let out_dir = dir.path().join("out");
    let out = placy(&["bench", "--spec", arg(&spec), "--seeds", "5", "--out", arg(&out_dir)]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let resolved = read_json(&out_dir.join("spec.json"));
    assert_eq!(resolved["seeds"], serde_json::json!([5]));
    assert_eq!(resolved["length"], 400);
    let raw = std::fs::read_to_string(out_dir.join("raw.csv")).unwrap();
    assert_eq!(raw.lines().count(), 2);
}

#[test]
fn threads_fall_back_to_environment() {
    let dir = tempfile::tempdir().unwrap();
    let data = generate(dir.path(), &["--n-vars", "2", "--length", "400"]);
    let out = Command::new(env!("CARGO_BIN_EXE_placy"))
        .args(["baseline", "--input", arg(&data), "--out", arg(&dir.path().join("g.json"))])
        .env("PLACY_THREADS", "2")
        .output()
        .unwrap();
    assert!(out.status.success());
    let out = Command::new(env!("CARGO_BIN_EXE_placy"))
        .args(["baseline", "--input", arg(&data), "--out", arg(&dir.path().join("g.json"))])
        .env("PLACY_THREADS", "many")
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(3));
}

#[test]
fn config_and_analysis_errors_have_distinct_codes() {
    let dir = tempfile::tempdir().unwrap();
    let data = generate(dir.path(), &["--n-vars", "2", "--length", "80"]);
    let graph = arg(&dir.path().join("g.json")).to_string();
    let input = arg(&data).to_string();

    let bad_alpha = placy(&["discover", "--input", &input, "--alpha", "1.5", "--out", &graph]);
    assert_eq!(bad_alpha.status.code(), Some(3));
    let bad_window = placy(&["discover", "--input", &input, "--window", "4", "--out", &graph]);
    assert_eq!(bad_window.status.code(), Some(3));
    let unknown = placy(&["discover", "--frobnicate"]);
    assert_eq!(unknown.status.code(), Some(3));

    let too_short = placy(&["discover", "--input", &input, "--out", &graph]);
    assert_eq!(too_short.status.code(), Some(4));
    assert!(String::from_utf8_lossy(&too_short.stderr).contains("too short"));

    let garbled = dir.path().join("bad.csv");
    std::fs::write(&garbled, "a,b\n1,2\n3,x\n").unwrap();
    let parse = placy(&["discover", "--input", arg(&garbled), "--out", &graph]);
    assert_eq!(parse.status.code(), Some(3));
    assert!(String::from_utf8_lossy(&parse.stderr).contains("row 3"));
}

#[test]
fn select_window_reports_each_variable() {
    let dir = tempfile::tempdir().unwrap();
    let data = generate(dir.path(), &["--n-vars", "3", "--length", "600"]);
    let report = dir.path().join("w.json");
    let out = placy(&["select-window", "--input", arg(&data), "--candidates", "50,100", "--out", arg(&report)]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let stdout = String::from_utf8(out.stdout).unwrap();
    assert_eq!(stdout.lines().count(), 4);
    let json = read_json(&report);
    assert_eq!(json["selections"].as_array().unwrap().len(), 3);
    assert_eq!(json["candidates"], serde_json::json!([50, 100]));
}
