use std::path::Path;
use std::process::{Command, Output};

use serde_json::Value;

fn a2a(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_a2a")).args(args).output().expect("binary runs")
}

fn stdout_json(out: &Output) -> Value {
    assert!(out.status.success(), "stderr: {}", String::from_utf8_lossy(&out.stderr));
    serde_json::from_slice(&out.stdout).expect("json on stdout")
}

fn path(p: &Path) -> &str {
    p.to_str().unwrap()
}

#[test]
fn plan_picks_two_reconfigurations_at_seven_t() {
    let summary = stdout_json(&a2a(&["plan", "--n", "8", "--k", "1", "--R-in-T", "7"]));
    assert_eq!(summary["d"], 2);
    assert!((summary["totalInT"].as_f64().unwrap() - 30.0).abs() < 1e-9);
    assert_eq!(summary["cost"]["transmitSlots"], 16);
}

#[test]
fn lower_bound_table_for_eight_nodes() {
    let out = a2a(&["lower-bound", "--n", "8"]);
    assert!(out.status.success());
    let text = String::from_utf8(out.stdout).unwrap();
    let mut lines = text.lines();
    let header: Vec<&str> = lines.next().unwrap().split(',').collect();
    let d_col = header.iter().position(|h| *h == "d").unwrap();
    let sum_col = header.iter().position(|h| *h == "power_sum").unwrap();
    let rows: Vec<Vec<&str>> = lines.map(|l| l.split(',').collect()).collect();
    assert_eq!(rows.len(), 7);
    for (d, want) in [("1", "28"), ("2", "16"), ("7", "7")] {
        let row = rows.iter().find(|r| r[d_col] == d).unwrap();
        assert_eq!(row[sum_col], want, "d={d}");
    }
}

#[test]
fn pipeline_round_trip() {
    let dir = tempfile::tempdir().unwrap();
    let traffic = dir.path().join("traffic.json");
    let strategy = dir.path().join("strategy.json");
    let trace = dir.path().join("trace.csv");
    let out = a2a(&["gen-traffic", "--kind", "random", "--n", "12", "--mean-chunks", "3", "--seed", "7", "-o", path(&traffic)]);
    assert!(out.status.success());
    let summary = stdout_json(&a2a(&["plan", "--traffic", path(&traffic), "--k", "2", "--T", "1", "--R", "4", "-o", path(&strategy)]));
    let verified = stdout_json(&a2a(&["verify", "--strategy", path(&strategy), "--traffic", path(&traffic)]));
    assert_eq!(verified["ok"], true);
    assert_eq!(verified["d"], summary["d"]);
    let sim = stdout_json(&a2a(&[
        "simulate", "--strategy", path(&strategy), "--traffic", path(&traffic), "--T", "1", "--R", "4", "--trace", path(&trace),
    ]));
    assert_eq!(sim["totalSeconds"], summary["cost"]["totalSeconds"]);
    assert_eq!(sim["violations"].as_array().unwrap().len(), 0);
    let trace = std::fs::read_to_string(trace).unwrap();
    assert!(trace.starts_with("time_s,event,link,flow,chunk_index"));
}

#[test]
fn duplicated_flow_is_rejected_with_its_endpoints() {
    let dir = tempfile::tempdir().unwrap();
    let traffic = dir.path().join("traffic.json");
    let strategy = dir.path().join("strategy.json");
    assert!(a2a(&["gen-traffic", "--kind", "uniform", "--n", "8", "-o", path(&traffic)]).status.success());
    stdout_json(&a2a(&["plan", "--n", "8", "--k", "1", "--R-in-T", "7", "-o", path(&strategy)]));

    let mut s: Value = serde_json::from_str(&std::fs::read_to_string(&strategy).unwrap()).unwrap();
    let rounds = s["stages"][1]["rounds"].as_array_mut().unwrap();
    let entry = rounds[0]["entries"][0].clone();
    rounds.push(serde_json::json!({ "entries": [entry.clone()] }));
    std::fs::write(&strategy, s.to_string()).unwrap();

    let out = a2a(&["verify", "--strategy", path(&strategy), "--traffic", path(&traffic)]);
    assert_eq!(out.status.code(), Some(2));
    let err: Value = serde_json::from_slice(&out.stderr).unwrap();
    assert_eq!(err["error"]["kind"], "conservation");
    assert_eq!(err["error"]["detail"]["src"], entry["src"]);
    assert_eq!(err["error"]["detail"]["dst"], entry["dst"]);
}

#[test]
fn invalid_arguments_exit_two() {
    let out = a2a(&["plan", "--n", "1", "--k", "1"]);
    assert_eq!(out.status.code(), Some(2));
    let err: Value = serde_json::from_slice(&out.stderr).unwrap();
    assert_eq!(err["error"]["kind"], "invalidParams");
}
