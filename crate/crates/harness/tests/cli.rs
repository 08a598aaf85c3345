use std::path::Path;
use std::process::{Command, Output};

use serde_json::Value;

fn famsec(dir: &Path, args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_famsec"))
        .current_dir(dir)
        .args(args)
        .output()
        .unwrap()
}

fn json(out: &Output) -> Value {
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    serde_json::from_slice(&out.stdout).unwrap()
}

fn write_task(dir: &Path) {
    let out = famsec(dir, &["--seed", "9", "gen-network", "--with-task", "--n", "10"]);
    assert!(out.status.success());
    std::fs::write(dir.join("task.json"), out.stdout).unwrap();
}

#[test]
fn gen_network_then_assess_round_trip() {
    let dir = tempfile::tempdir().unwrap();
    write_task(dir.path());
    let report = json(&famsec(dir.path(), &["--runs", "50", "assess", "--task", "task.json"]));
    assert_eq!(report["tool"], "famsec");
    assert_eq!(report["command"], "assess");
    let x_o = report["results"]["outcome"]["x_o"].as_f64().unwrap();
    assert!((-1.0..=1.0).contains(&x_o));
    let t = &report["results"]["terminals"];
    let total: u64 = ["caught", "delivered", "timeout"].iter().map(|k| t[k].as_u64().unwrap()).sum();
    assert_eq!(total, 50);
}

#[test]
fn plain_network_has_requested_size() {
    let dir = tempfile::tempdir().unwrap();
    let doc = json(&famsec(dir.path(), &["gen-network", "--kind", "erdos_renyi", "--n", "15"]));
    assert_eq!(doc["n"].as_u64(), Some(15));
}

#[test]
fn out_dir_receives_report_and_tables() {
    let dir = tempfile::tempdir().unwrap();
    let out = famsec(dir.path(), &["--out", "res", "--format", "csv", "experiment", "synthetic_xo"]);
    assert!(out.status.success());
    assert!(dir.path().join("res/synthetic_xo_panels.csv").exists());
    let out = famsec(dir.path(), &["--out", "res", "experiment", "synthetic_xo"]);
    assert!(out.status.success());
    let report: Value = serde_json::from_str(&std::fs::read_to_string(dir.path().join("res/synthetic_xo.json")).unwrap()).unwrap();
    assert_eq!(report["results"]["panels"].as_array().unwrap().len(), 12);
}

#[test]
fn validation_errors_exit_with_2() {
    let dir = tempfile::tempdir().unwrap();
    write_task(dir.path());
    for args in [
        &["experiment", "nope"][..],
        &["experiment", "exp3"],
        &["experiment", "exp4"],
        &["--runs", "0", "experiment", "exp1"],
        &["assess", "--task", "missing.json"],
        &["assess", "--task", "task.json", "--solver", "mcts:depth=x"],
        &["assess", "--task", "task.json", "--k", "0"],
        &["solverq", "--task", "task.json", "--trusted", "model:", "--candidate", "vi"],
        &["gen-network", "--n", "3"],
        &["surrogate", "train"],
    ] {
        let out = famsec(dir.path(), args);
        assert_eq!(out.status.code(), Some(2), "{args:?}: {}", String::from_utf8_lossy(&out.stderr));
    }
}

#[test]
fn missing_model_file_is_reported() {
    let dir = tempfile::tempdir().unwrap();
    let out = famsec(dir.path(), &["experiment", "exp3", "--model", "absent.json"]);
    assert_ne!(out.status.code(), Some(0));
    assert!(!out.stderr.is_empty());
}

#[test]
fn clap_usage_errors_exit_with_2() {
    let dir = tempfile::tempdir().unwrap();
    assert_eq!(famsec(dir.path(), &["--format", "xml", "experiment", "exp1"]).status.code(), Some(2));
}

#[test]
fn exp2_anchor_at_small_m() {
    let dir = tempfile::tempdir().unwrap();
    let report = json(&famsec(dir.path(), &["--runs", "60", "experiment", "exp2"]));
    let rows = report["results"]["rows"].as_array().unwrap();
    let x_s = |d: u64| {
        rows.iter()
            .find(|r| r["depth"].as_u64() == Some(d))
            .map(|r| r["quality"]["x_s"].as_f64().unwrap())
            .unwrap()
    };
    assert!((0.9..=1.1).contains(&x_s(25)), "x_S(25) = {}", x_s(25));
    assert!(x_s(1) < 0.95, "x_S(1) = {}", x_s(1));
}

#[test]
fn surrogate_train_predict_and_exp3() {
    let dir = tempfile::tempdir().unwrap();
    write_task(dir.path());
    let out = famsec(
        dir.path(),
        &["--runs", "10", "--out", "m", "surrogate", "train", "--preset", "exp3", "--tasks", "12", "--trusted-depth", "2", "--epochs", "20"],
    );
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    assert!(dir.path().join("m/surrogate_model.json").exists());
    let pred = json(&famsec(dir.path(), &["surrogate", "predict", "--model", "m/surrogate_model.json", "--task", "task.json"]));
    assert!(pred["results"]["prediction"]["mu"].as_f64().unwrap().is_finite());
    let sq = json(&famsec(
        dir.path(),
        &["--runs", "20", "solverq", "--task", "task.json", "--trusted", "model:m/surrogate_model.json", "--candidate", "mcts:depth=2,its=20,explore=1000"],
    ));
    let x_s = sq["results"]["quality"]["x_s"].as_f64().unwrap();
    assert!((0.0..=2.0).contains(&x_s));
    let exp3 = json(&famsec(
        dir.path(),
        &["--runs", "5", "experiment", "exp3", "--model", "m/surrogate_model.json", "--trusted-depth", "2"],
    ));
    assert_eq!(exp3["results"]["rows"].as_array().unwrap().len(), 40);
}
