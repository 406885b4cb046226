use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use serde_json::Value;

fn scenario(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../../scenarios").join(format!("{name}.json"))
}

fn netpass(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_netpass")).args(args).output().expect("binary runs")
}

fn json(out: &Output) -> Value {
    serde_json::from_slice(&out.stdout).unwrap_or_else(|e| {
        panic!("{e}\nstdout: {}\nstderr: {}", String::from_utf8_lossy(&out.stdout), String::from_utf8_lossy(&out.stderr))
    })
}

fn path_str(p: &Path) -> &str {
    p.to_str().unwrap()
}

#[test]
fn analyze_case_study() {
    let out = netpass(&["analyze-graph", "--scenario", path_str(&scenario("neural_linear"))]);
    assert_eq!(out.status.code(), Some(0));
    let v = json(&out);
    assert_eq!(v["graph_report"]["balanced"], true);
    assert_eq!(v["graph_report"]["max_out_degree"], 2);
    assert_eq!(v["proposition1"]["holds"], true);
    assert_eq!(v["proposition2_3"]["consistent"], true);
    assert_eq!(v["spectral"]["kernels_equal"], true);
    assert_eq!(v["scenario_hash"].as_str().unwrap().len(), 64);
}

#[test]
fn analyze_path_graph_file() {
    let dir = tempfile::tempdir().unwrap();
    let g = dir.path().join("path.json");
    std::fs::write(&g, r#"{"n_vertices": 2, "edges": [[1, 2]]}"#).unwrap();
    let out = netpass(&["analyze-graph", "--graph", path_str(&g)]);
    assert_eq!(out.status.code(), Some(0));
    let v = json(&out);
    assert_eq!(v["spectral"]["feedback_passive"], false);
    let min = v["spectral"]["min_eigenvalue"].as_f64().unwrap();
    assert!((min - (1.0 - 2f64.sqrt()) / 2.0).abs() < 1e-12);
    assert_eq!(v["proposition2_3"]["balanced"], false);
}

#[test]
fn malformed_input_exits_with_2() {
    let dir = tempfile::tempdir().unwrap();
    let bad = dir.path().join("bad.json");
    std::fs::write(&bad, "{\n  \"name\": \"x\",\n  \"graph\": [\n").unwrap();
    for cmd in ["analyze-graph", "simulate", "audit"] {
        let out = netpass(&[cmd, "--scenario", path_str(&bad)]);
        assert_eq!(out.status.code(), Some(2), "{cmd}");
        let err = String::from_utf8_lossy(&out.stderr);
        assert!(err.contains("line"), "{err}");
    }
    let missing = netpass(&["simulate", "--scenario", "/nonexistent/scenario.json"]);
    assert_eq!(missing.status.code(), Some(2));
    let flags = netpass(&["simulate"]);
    assert_eq!(flags.status.code(), Some(2));
}

#[test]
fn simulate_writes_reproducible_csv() {
    let dir = tempfile::tempdir().unwrap();
    let out = netpass(&["simulate", "--scenario", path_str(&scenario("neural_linear")), "--out-dir", path_str(dir.path()), "--svg", "--seed", "9"]);
    assert_eq!(out.status.code(), Some(0));
    let v = json(&out);
    assert_eq!(v["status"], "converged");
    assert!(v["final_output_norm"].as_f64().unwrap() <= 1e-3);
    assert_eq!(v["seed"], 9);
    let hash = v["scenario_hash"].as_str().unwrap().to_string();

    let csv = std::fs::read_to_string(dir.path().join("neural_linear.csv")).unwrap();
    let mut lines = csv.lines();
    let first = lines.next().unwrap();
    assert!(first.starts_with('#') && first.contains(&hash) && first.contains("tool_version="));
    let header = lines.next().unwrap();
    let expected: Vec<String> = std::iter::once("t".to_string())
        .chain((1..=5).map(|i| format!("x_{i}")))
        .chain((1..=5).map(|i| format!("y_{i}")))
        .chain((1..=5).map(|i| format!("u_{i}")))
        .chain((1..=7).map(|i| format!("zeta_{i}")))
        .chain((1..=7).map(|i| format!("mu_{i}")))
        .chain(std::iter::once("disagreement_norm".to_string()))
        .collect();
    assert_eq!(header, expected.join(","));
    let rows: Vec<&str> = lines.collect();
    assert_eq!(rows.len(), 3001);
    for row in &rows {
        assert_eq!(row.split(',').count(), expected.len());
    }
    assert!(!csv.contains('\r'));
    let t0: Vec<f64> = rows[0].split(',').map(|c| c.parse().unwrap()).collect();
    assert_eq!(&t0[1..6], &[-2.0, -3.0, 6.0, 10.0, 1.0]);

    let summary: Value = serde_json::from_str(&std::fs::read_to_string(dir.path().join("neural_linear.summary.json")).unwrap()).unwrap();
    assert_eq!(summary["scenario_hash"], hash.as_str());
    let svg = std::fs::read_to_string(dir.path().join("neural_linear.svg")).unwrap();
    assert_eq!(svg.matches("<polyline").count(), 5);
    assert!(svg.contains(&hash));

    let again = tempfile::tempdir().unwrap();
    let out = netpass(&["simulate", "--scenario", path_str(&scenario("neural_linear")), "--out-dir", path_str(again.path())]);
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(csv, std::fs::read_to_string(again.path().join("neural_linear.csv")).unwrap());
}

#[test]
fn overrides_change_the_hash() {
    let dir = tempfile::tempdir().unwrap();
    let base = json(&netpass(&["simulate", "--scenario", path_str(&scenario("path_feedback_nonpassive")), "--out-dir", path_str(dir.path())]));
    let short = json(&netpass(&[
        "simulate", "--scenario", path_str(&scenario("path_feedback_nonpassive")), "--out-dir", path_str(dir.path()), "--t-end", "2", "--dt", "0.002",
    ]));
    assert_ne!(base["scenario_hash"], short["scenario_hash"]);
    assert_eq!(short["config"]["t_end"], 2.0);
    assert_eq!(short["config"]["dt"], 0.002);
    assert_eq!(short["final_time"], 2.0);
}

#[test]
fn decomposed_csv_carries_w_and_z() {
    let dir = tempfile::tempdir().unwrap();
    let text = std::fs::read_to_string(scenario("neural_rectified")).unwrap().replace("directed_out", "decomposed_directed");
    let s = dir.path().join("dec.json");
    std::fs::write(&s, text).unwrap();
    let out = netpass(&["simulate", "--scenario", path_str(&s), "--out-dir", path_str(dir.path()), "--t-end", "1"]);
    assert_eq!(out.status.code(), Some(0));
    let csv = std::fs::read_to_string(dir.path().join("neural_rectified.csv")).unwrap();
    let header = csv.lines().nth(1).unwrap();
    assert!(header.contains(",mu_7,w_1,") && header.contains(",w_5,z_1,") && header.ends_with(",z_5,disagreement_norm"));
    let cols = header.split(',').count();
    assert_eq!(cols, 2 + 5 + 2 * 5 + 2 * 7 + 2 * 5);
    assert!(csv.lines().skip(2).all(|r| r.split(',').count() == cols));
    let v = json(&out);
    assert_eq!(v["audits"]["theorem_audit"]["status"], "completed");
}

#[test]
fn regular_consensus_is_not_average() {
    let dir = tempfile::tempdir().unwrap();
    let v = json(&netpass(&["simulate", "--scenario", path_str(&scenario("unbalanced_regular_consensus")), "--out-dir", path_str(dir.path())]));
    assert_eq!(v["status"], "converged");
    assert_eq!(v["graph_report"]["balanced"], false);
    let mean = v["final_output_mean"].as_f64().unwrap();
    assert!((mean - 1.0).abs() < 1e-6, "{mean}");
    assert!((mean - 3.0).abs() > 1.0);
}

#[test]
fn divergence_exits_with_1() {
    let dir = tempfile::tempdir().unwrap();
    // RK4 is unstable for dt · 5 well past 2.8
    let out = netpass(&[
        "simulate", "--scenario", path_str(&scenario("linear_balanced_average")), "--out-dir", path_str(dir.path()), "--dt", "2", "--t-end", "2000",
    ]);
    assert_eq!(out.status.code(), Some(1));
    let v = json(&out);
    assert_eq!(v["status"], "diverged");
    let t = v["divergence"]["last_finite_time"].as_f64().unwrap();
    assert!(t > 0.0 && t < 2000.0);
    assert!(dir.path().join("linear_balanced_average.summary.json").exists());
}

#[test]
fn audit_case_study_passes() {
    let out = netpass(&["audit", "--scenario", path_str(&scenario("neural_linear"))]);
    assert_eq!(out.status.code(), Some(0));
    let v = json(&out);
    assert_eq!(v["mode"], "decomposed_directed");
    assert_eq!(v["theorem_condition"]["epsilon_min"], 1.5);
    assert_eq!(v["theorem_condition"]["max_out_degree"], 2);
    assert_eq!(v["audits"]["theorem_condition_gain_as_index"]["satisfied"], true);
    for k in ["agent_audit", "controller_audit", "theorem_audit"] {
        assert_eq!(v["audits"][k]["passed"], true, "{k}");
    }
    assert!(v["violations"].as_array().unwrap().is_empty());
}

#[test]
fn audit_flags_inflated_claims() {
    let dir = tempfile::tempdir().unwrap();
    let out = netpass(&["audit", "--scenario", path_str(&scenario("falsification_audit")), "--out-dir", path_str(dir.path())]);
    assert_eq!(out.status.code(), Some(4));
    let v = json(&out);
    assert!(v["audits"]["theorem_audit"]["min_margin"].as_f64().unwrap() < -1e-3);
    assert_eq!(v["theorem_condition"]["epsilon_min"], 3.0);
    assert!(dir.path().join("falsification_audit.audit.json").exists());
}

#[test]
fn audit_unbalanced_is_unsupported() {
    let out = netpass(&["audit", "--scenario", path_str(&scenario("unbalanced_regular_consensus"))]);
    assert_eq!(out.status.code(), Some(0));
    let v = json(&out);
    for k in ["agent_audit", "controller_audit"] {
        assert_eq!(v["audits"][k]["status"], "unsupported");
        assert!(v["audits"][k]["reason"].as_str().unwrap().contains("balanced"));
    }
    assert_eq!(v["graph_analysis"]["graph_report"]["balanced"], false);
}

#[test]
fn prop_suite_cli() {
    let zero = netpass(&["prop-suite", "--count", "0"]);
    assert_eq!(zero.status.code(), Some(2));

    let a = netpass(&["prop-suite", "--seed", "5", "--count", "60"]);
    let b = netpass(&["prop-suite", "--seed", "5", "--count", "60"]);
    assert_eq!(a.stdout, b.stdout);
    assert_eq!(json(&a)["proposition1"]["passed"], 60);

    // seed 42 holds a graph whose sym(L_o) is singular although it is unbalanced
    let out = netpass(&["prop-suite", "--seed", "42", "--count", "200", "--n-max", "8"]);
    assert_eq!(out.status.code(), Some(3));
    let v = json(&out);
    let ce = &v["counterexamples"][0];
    assert_eq!(ce["check"], "proposition2_3");
    assert_eq!(ce["n_vertices"], 7);
    assert_eq!(ce["edges"][0], serde_json::json!([1, 2]));
    assert_eq!(v["proposition1"]["passed"], 200);
    assert_eq!(v["proposition3"]["passed"], 200);
}
