use std::process::{Command, Output};

use combined_incentive::networks::parse_edge_list;

fn incentive(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_incentive")).args(args).output().expect("binary runs")
}

fn stdout(out: &Output) -> String {
    String::from_utf8(out.stdout.clone()).unwrap()
}

fn value(text: &str, key: &str) -> String {
    text.lines()
        .find_map(|l| l.strip_prefix(&format!("{key},")))
        .unwrap_or_else(|| panic!("{key} missing from\n{text}"))
        .to_string()
}

fn data_lines(text: &str) -> Vec<&str> {
    text.lines().filter(|l| !l.starts_with('#')).collect()
}

#[test]
fn classify_reports_interior_case() {
    let out = incentive(&["classify", "--x0", "0.15", "--delta", "0.1"]);
    assert!(out.status.success());
    let text = stdout(&out);
    assert_eq!(value(&text, "case"), "interior");
    assert_eq!(value(&text, "check_margin"), "1.5");
    let p: f64 = value(&text, "p_star").parse().unwrap();
    assert!((p - 0.3131052).abs() < 1e-6);
}

#[test]
fn classify_rejects_infeasible_boundaries() {
    let out = incentive(&["classify", "--x0", "0.6", "--delta", "0.5"]);
    assert_eq!(out.status.code(), Some(3));
    assert!(String::from_utf8_lossy(&out.stderr).contains("infeasible"));
}

#[test]
fn classify_json_is_parseable() {
    let out = incentive(&["classify", "--x0", "0.1", "--delta", "0.3", "--format", "json"]);
    assert!(out.status.success());
    let v: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert!(v.get("provenance").is_some(), "{v}");
}

#[test]
fn analytic_sweep_matches_golden_file() {
    let out = incentive(&["sweep", "--x0", "0.15", "--delta", "0.1", "--p-grid", "0:1:0.05"]);
    assert!(out.status.success());
    let golden = include_str!("golden/sweep_complete_interior.csv");
    assert_eq!(data_lines(&stdout(&out)), data_lines(golden));
}

#[test]
fn sweep_header_lists_columns() {
    let out = incentive(&["sweep", "--x0", "0.3", "--delta", "0.1", "--p", "0.5"]);
    let text = stdout(&out);
    let lines = data_lines(&text);
    assert_eq!(
        lines[0],
        "p,j_analytic,j_analytic_normalized,j_mc_mean,j_mc_stderr,convergence_rate,regime,status"
    );
    assert_eq!(lines.len(), 2);
    assert!(lines[1].contains("punishment"), "{}", lines[1]);
}

#[test]
fn unknown_config_field_exits_with_usage_code() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("bad.json");
    std::fs::write(&path, r#"{"bogus": 1}"#).unwrap();
    let out = incentive(&["sweep", "--config", path.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn malformed_grid_exits_with_usage_code() {
    let out = incentive(&["sweep", "--x0", "0.15", "--delta", "0.1", "--p-grid", "1:0:0.1"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn flags_override_config_file() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("cfg.json");
    std::fs::write(&path, r#"{"seed": 5, "runs": 10, "bounds": {"x0": 0.3, "delta": 0.1}, "p_grid": "0.5"}"#).unwrap();
    let out = incentive(&["sweep", "--config", path.to_str().unwrap(), "--seed", "9", "--x0", "0.2"]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let text = stdout(&out);
    assert!(text.contains("# seed: 9"), "{text}");
    assert!(text.contains(r#""x0":0.2"#), "{text}");
    assert!(text.contains(r#""runs":10"#), "{text}");
}

#[test]
fn mc_non_convergence_exits_four_and_still_writes_table() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("mc.csv");
    let out = incentive(&[
        "mc", "--network", "complete", "--runs", "10", "--max-sweeps", "1", "--p", "0.5",
        "--out", path.to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(4));
    let table = std::fs::read_to_string(&path).unwrap();
    assert!(data_lines(&table)[1].starts_with("0.5,10,0,"), "{table}");
}

#[test]
fn mc_is_reproducible_and_writes_traces() {
    let dir = tempfile::tempdir().unwrap();
    let trace = dir.path().join("trace.csv");
    let args = ["mc", "--network", "complete", "--runs", "20", "--p-grid", "0:1:0.5", "--seed", "3"];
    let first = incentive(&[&args[..], &["--trace", trace.to_str().unwrap()]].concat());
    let second = incentive(&args);
    assert!(first.status.success(), "{}", String::from_utf8_lossy(&first.stderr));
    assert_eq!(first.stdout, second.stdout);
    assert!(std::fs::read_to_string(&trace).unwrap().lines().count() > 20);
}

#[test]
fn ode_matches_closed_form() {
    let out = incentive(&["ode", "--x0", "0.15", "--delta", "0.1"]);
    assert!(out.status.success());
    let text = stdout(&out);
    let err: f64 = value(&text, "j_relative_error").parse().unwrap();
    assert!(err < 1e-6);
    let tf: f64 = value(&text, "t_f").parse().unwrap();
    let closed: f64 = value(&text, "t_f_closed_form").parse().unwrap();
    assert!((tf - closed).abs() < 1e-6);
}

#[test]
fn netgen_writes_lattice_edge_list() {
    let out = incentive(&["netgen", "--network", "lattice", "--l", "10", "--seed", "1"]);
    assert!(out.status.success());
    let graph = parse_edge_list(&stdout(&out)).unwrap();
    assert_eq!(graph.n(), 100);
    assert_eq!(graph.edge_count(), 200);
    assert!((0..100).all(|v| graph.degree(v) == 4));
}

#[test]
fn unknown_network_is_rejected() {
    let out = incentive(&["netgen", "--network", "hypercube"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn shipped_configs_load() {
    let dir = std::path::Path::new(env!("CARGO_MANIFEST_DIR")).join("configs");
    for entry in std::fs::read_dir(dir).unwrap() {
        let path = entry.unwrap().path();
        let cfg = combined_incentive::harness::ExperimentConfig::load(&path).unwrap();
        cfg.validate().unwrap_or_else(|e| panic!("{}: {e}", path.display()));
    }
}
