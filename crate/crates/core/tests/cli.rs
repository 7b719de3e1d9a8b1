use std::process::{Command, Output};

use serde_json::Value;

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_quadperm")).args(args).output().expect("spawn")
}

fn json(args: &[&str]) -> (i32, Value) {
    let out = run(args);
    let v = serde_json::from_slice(&out.stdout).unwrap_or_else(|e| panic!("{e}: {}", String::from_utf8_lossy(&out.stdout)));
    (out.status.code().unwrap(), v)
}

#[test]
fn check_reports_schema_and_match() {
    let (code, v) = json(&["check", "--q", "4", "--Q", "2", "--a", "1", "--b", "0", "--c", "0", "--d", "1"]);
    assert_eq!(code, 0);
    assert_eq!(v["schema"], 1);
    assert_eq!(v["command"], "check");
    assert_eq!(v["match"], true);
    assert_eq!(v["criterion"]["cond"].as_array().unwrap().len(), 5);
}

#[test]
fn malformed_element_is_usage_error() {
    let out = run(&["check", "--q", "4", "--Q", "2", "--a", "zz", "--b", "0", "--c", "0", "--d", "1"]);
    assert_eq!(out.status.code(), Some(1));
}

#[test]
fn unknown_subcommand_is_usage_error() {
    assert_eq!(run(&["frobnicate"]).status.code(), Some(1));
    assert_eq!(run(&["--help"]).status.code(), Some(0));
}

#[test]
fn exhaustive_sweep_over_f16() {
    let (code, v) = json(&["sweep", "--q", "4", "--Q", "2", "--exhaustive"]);
    assert_eq!(code, 0);
    assert_eq!(v["total"], 65536);
    assert_eq!(v["mismatches"], 0);
    assert_eq!(v["permutations"], 2160);
}

#[test]
fn random_sweep_is_deterministic_per_seed() {
    let a = run(&["--seed", "7", "sweep", "--q", "8", "--Q", "2", "--samples", "3000"]);
    let b = run(&["--seed", "7", "--jobs", "1", "sweep", "--q", "8", "--Q", "2", "--samples", "3000"]);
    assert_eq!(a.status.code(), Some(0));
    assert_eq!(a.stdout, b.stdout);
    let c = run(&["--seed", "8", "sweep", "--q", "8", "--Q", "2", "--samples", "3000"]);
    let da: Value = serde_json::from_slice(&a.stdout).unwrap();
    let dc: Value = serde_json::from_slice(&c.stdout).unwrap();
    assert_ne!(da["digest"], dc["digest"]);
}

#[test]
fn csv_sweep_has_header() {
    let out = run(&["--format", "csv", "sweep", "--q", "2", "--Q", "2", "--exhaustive"]);
    assert_eq!(out.status.code(), Some(0));
    let text = String::from_utf8(out.stdout).unwrap();
    let mut lines = text.lines();
    assert_eq!(lines.next(), Some("q,Q,r,a,b,c,d,criterion,oracle,match"));
    assert_eq!(lines.count(), 256);
}

#[test]
fn over_budget_exhaustive_is_refused() {
    assert_eq!(run(&["sweep", "--q", "16", "--Q", "2", "--exhaustive"]).status.code(), Some(1));
}

#[test]
fn identity_and_corollary_pass() {
    let (code, v) = json(&["identity", "--q", "2", "--n", "3"]);
    assert_eq!(code, 0);
    assert_eq!(v["pass"], true);
    let (code, v) = json(&["corollary", "--id", "9.5", "--q", "8", "--Q", "2", "--exhaustive"]);
    assert_eq!(code, 0);
    assert_eq!(v["agreements"], v["checked"]);
}

#[test]
fn families_cross_check_is_equal() {
    let (code, v) = json(&["families", "--q", "4", "--Q", "2", "--cross-check"]);
    assert_eq!(code, 0);
    assert!(v.to_string().contains("\"equal\":true"));
}

#[test]
fn out_flag_writes_file() {
    let dir = std::env::temp_dir().join(format!("quadperm-cli-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let path = dir.join("info.json");
    let out = run(&["--out", path.to_str().unwrap(), "field-info", "--q", "8"]);
    assert_eq!(out.status.code(), Some(0));
    let v: Value = serde_json::from_str(&std::fs::read_to_string(&path).unwrap()).unwrap();
    assert_eq!(v["n"], 3);
    std::fs::remove_dir_all(dir).ok();
}
