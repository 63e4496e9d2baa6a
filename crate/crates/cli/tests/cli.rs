use std::path::Path;
use std::process::{Command, Output};

use serde_json::Value;

fn pachlab(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_pachlab"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn stdout_json(out: &Output) -> Value {
    assert!(out.status.success(), "stderr: {}", String::from_utf8_lossy(&out.stderr));
    serde_json::from_slice(&out.stdout).expect("json on stdout")
}

fn stderr_json(out: &Output) -> Value {
    assert!(!out.status.success());
    serde_json::from_slice(&out.stderr).expect("json error record")
}

#[test]
fn bounds_reports_threshold_and_constant() {
    let v = stdout_json(&pachlab(&["bounds", "--d", "2", "--n", "100"]));
    assert_eq!(v["result"]["threshold_coloring"], 116);
    assert_eq!(v["result"]["gromov_constant"], "1/192");
    assert_eq!(v["config"]["n"], 100);
    assert_eq!(v["version"], env!("CARGO_PKG_VERSION"));
}

#[test]
fn bounds_csv_has_provenance_header() {
    let out = pachlab(&["bounds", "--n", "1000", "--format", "csv"]);
    let text = String::from_utf8(out.stdout).unwrap();
    let mut lines = text.lines();
    let header: Value = serde_json::from_str(lines.next().unwrap().trim_start_matches("# ")).unwrap();
    assert_eq!(header["command"], "bounds");
    assert_eq!(lines.next(), Some("quantity,value"));
    assert!(text.contains("threshold_coloring,173"));
}

#[test]
fn randomized_commands_need_a_seed() {
    for args in [
        vec!["sphere-exp", "--n", "3"],
        vec!["color-search", "--n", "4", "--m", "2"],
        vec!["build-map", "--n", "3"],
        vec!["cofill"],
        vec!["extract"],
    ] {
        let out = pachlab(&args);
        assert_eq!(out.status.code(), Some(2), "{args:?}");
        assert_eq!(stderr_json(&out)["error"]["kind"], "missing_seed");
    }
}

#[test]
fn same_config_gives_identical_artifacts() {
    let dir = tempfile::tempdir().unwrap();
    let run = |name: &str| {
        let path = dir.path().join(name);
        let out = pachlab(&[
            "sphere-exp", "--n", "3", "--seed", "5", "--fillings", "2", "--format", "csv",
            "--out", path.to_str().unwrap(),
        ]);
        assert!(out.status.success());
        std::fs::read(path).unwrap()
    };
    assert_eq!(run("a.csv"), run("b.csv"));
}

#[test]
fn job_count_does_not_change_output() {
    let one = pachlab(&["sphere-exp", "--n", "3", "--seed", "2", "--fillings", "2", "--jobs", "1"]);
    let four = pachlab(&["sphere-exp", "--n", "3", "--seed", "2", "--fillings", "2", "--jobs", "4"]);
    assert!(one.status.success() && four.status.success());
    assert_eq!(one.stdout, four.stdout);
}

fn build_map(dir: &Path, n: &str, seed: &str) -> std::path::PathBuf {
    let path = dir.join(format!("map{n}_{seed}.json"));
    let out = pachlab(&["build-map", "--n", n, "--seed", seed, "--validate", "--out", path.to_str().unwrap()]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    path
}

#[test]
fn pipeline_runs_on_a_built_map() {
    let dir = tempfile::tempdir().unwrap();
    let map = build_map(dir.path(), "4", "3");
    let v = stdout_json(&pachlab(&["pipeline", "--map", map.to_str().unwrap(), "--seed", "1"]));
    let r = &v["result"];
    let t = r["t"].as_u64().unwrap();
    assert!(t >= 1);
    assert_eq!(r["verified_triangles"].as_u64().unwrap(), t * t * t);
    assert_eq!(v["seed"], 1);
}

#[test]
fn pipeline_rejects_invalid_map_with_violations() {
    let dir = tempfile::tempdir().unwrap();
    let map = build_map(dir.path(), "4", "3");
    let mut doc: Value = serde_json::from_str(&std::fs::read_to_string(&map).unwrap()).unwrap();
    let borrowed = doc["edges"][1]["polyline"][1].clone();
    doc["edges"][0]["polyline"][1] = borrowed;
    let bad = dir.path().join("bad.json");
    std::fs::write(&bad, doc.to_string()).unwrap();
    let out = pachlab(&["pipeline", "--map", bad.to_str().unwrap(), "--seed", "1"]);
    assert_eq!(out.status.code(), Some(1));
    let err = stderr_json(&out);
    assert_eq!(err["error"]["kind"], "invalid_map");
    assert!(!err["error"]["details"]["violations"].as_array().unwrap().is_empty());
}

#[test]
fn config_file_supplies_flags() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("cfg.json");
    std::fs::write(&cfg, r#"{"n": 100, "d": 2}"#).unwrap();
    let v = stdout_json(&pachlab(&["bounds", "--config", cfg.to_str().unwrap()]));
    assert_eq!(v["result"]["threshold_coloring"], 116);
    let v = stdout_json(&pachlab(&["bounds", "--config", cfg.to_str().unwrap(), "--n", "1000"]));
    assert_eq!(v["result"]["threshold_coloring"], 173);
}

#[test]
fn extract_matches_oracle_on_random_graph() {
    let v = stdout_json(&pachlab(&["extract", "--seed", "4", "--n", "6", "--density", "0.8"]));
    let r = &v["result"];
    let greedy = r["t"].as_u64().unwrap_or(0);
    assert!(greedy <= r["oracle"]["t"].as_u64().unwrap());
}

#[test]
fn extract_reads_hypergraph_records() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("h.json");
    let mut edges = Vec::new();
    for a in 0..2 {
        for b in 0..2 {
            for c in 0..2 {
                edges.push(vec![a, b, c]);
            }
        }
    }
    edges.push(vec![2, 2, 2]);
    std::fs::write(&path, serde_json::json!({ "parts": [3, 3, 3], "edges": edges }).to_string()).unwrap();
    let v = stdout_json(&pachlab(&["extract", "--input", path.to_str().unwrap()]));
    assert_eq!(v["result"]["found"]["t"], 2);
    assert_eq!(v["result"]["oracle"]["t"], 2);
}

#[test]
fn clique_prob_is_exact_for_m2() {
    let v = stdout_json(&pachlab(&["clique-prob", "--m", "2"]));
    assert_eq!(v["result"]["exact"], "1699/4096");
    assert_eq!(v["result"]["within_bound"], true);
}

#[test]
fn chains_verify_reports_top_cohomology() {
    let v = stdout_json(&pachlab(&["chains-verify", "--n", "3"]));
    assert_eq!(v["result"]["ok"], true);
    assert_eq!(v["result"]["cohomology_ranks"], serde_json::json!([0, 0, 8]));
}

#[test]
fn cofill_respects_the_constant() {
    let v = stdout_json(&pachlab(&["cofill", "--seed", "9"]));
    assert_eq!(v["result"]["within_constant"], true);
    assert_eq!(v["result"]["exact"], true);
}

#[test]
fn bad_flags_give_a_usage_record() {
    let out = pachlab(&["bounds", "--n", "abc"]);
    assert_eq!(out.status.code(), Some(2));
    assert_eq!(stderr_json(&out)["error"]["kind"], "usage");
}
