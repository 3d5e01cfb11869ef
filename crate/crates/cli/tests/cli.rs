use std::path::PathBuf;
use std::process::{Command, Output};

use serde_json::Value;

fn data(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("tests/data").join(name)
}

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_orlicz-kit"))
        .args(args)
        .env_remove("ORLICZ_KIT_SEED")
        .output()
        .expect("binary runs")
}

fn op(cmd: &str, file: &str) -> Value {
    let path = data(file);
    let out = run(&[cmd, "--config", path.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    let v: Value = serde_json::from_slice(&out.stdout).unwrap();
    v["result"].clone()
}

fn close(v: &Value, want: f64) -> bool {
    (v.as_f64().unwrap() - want).abs() < 1e-5
}

#[test]
fn norm_report() {
    let r = op("norm", "norm.json");
    assert!(close(&r["luxemburg"]["value"], 3.5355339));
    assert!(close(&r["amemiya"]["value"], 7.0710678));
    assert!(close(&r["modular"], 12.5));
}

#[test]
fn conjugate_report() {
    let r = op("conjugate", "conjugate.json");
    let dual = &r["dual"]["values"];
    assert!(dual.as_array().is_some_and(|a| !a.is_empty()));
}

#[test]
fn decompositions() {
    let r = op("decompose", "decompose.json");
    assert!(r.get("de_giorgi").is_some());
    assert!(r.get("hewitt_yosida").is_none());
    let r = op("decompose", "decompose_tail.json");
    assert!(r.get("hewitt_yosida").is_some());
}

#[test]
fn interchange_and_its_failure() {
    let r = op("interchange", "interchange.json");
    assert_eq!(r["agree"], Value::Bool(true));
    let r = op("interchange", "interchange_break.json");
    assert_eq!(r["agree"], Value::Bool(false));
    assert_eq!(r["hypothesis_holds"], Value::Bool(false));
}

#[test]
fn remaining_operations_succeed() {
    for (cmd, file) in [
        ("conjugate-integral", "conjugate_integral.json"),
        ("subdiff", "subdiff.json"),
        ("decompose-functional", "functional.json"),
        ("reflexivity", "reflexivity.json"),
        ("delta2", "delta2.json"),
    ] {
        op(cmd, file);
    }
}

#[test]
fn list_names_every_suite() {
    let out = run(&["list"]);
    assert!(out.status.success());
    let v: Value = serde_json::from_slice(&out.stdout).unwrap();
    let names: Vec<&str> = v["result"].as_array().unwrap().iter().map(|s| s["name"].as_str().unwrap()).collect();
    assert_eq!(names.len(), 14);
    assert_eq!(names[0], "measure");
}

#[test]
fn verify_is_deterministic_across_threads() {
    let a = run(&["verify", "--suite", "charges", "--suite", "orlicz", "--seed", "3"]);
    let b = run(&["verify", "--suite", "orlicz", "--suite", "charges", "--seed", "3", "--parallel"]);
    assert!(a.status.success());
    assert_eq!(a.stdout, b.stdout);
}

#[test]
fn csv_output() {
    let out = run(&["verify", "--suite", "measure", "--format", "csv"]);
    assert!(out.status.success());
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(text.lines().count() > 1);
}

#[test]
fn exit_codes() {
    // impossible tolerance: checks fail
    let out = run(&["verify", "--suite", "norms", "--tol", "1e-30"]);
    assert_eq!(out.status.code(), Some(1));

    let dir = std::env::temp_dir().join(format!("orlicz-kit-cli-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let bad = dir.join("bad.json");
    std::fs::write(&bad, "{\"seed\": oops}").unwrap();
    let out = run(&["verify", "--config", bad.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("bad.json:1:"));

    assert_eq!(run(&["verify", "--suite", "nope"]).status.code(), Some(2));
    assert_eq!(run(&["norm"]).status.code(), Some(2));

    let missing = dir.join("missing.json");
    assert_eq!(run(&["norm", "--config", missing.to_str().unwrap()]).status.code(), Some(3));
    std::fs::remove_dir_all(&dir).ok();
}
